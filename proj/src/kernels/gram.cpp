#include "firm/kernels.hpp"

#include <algorithm>

namespace firm {

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  const Eigen::MatrixXd Xt = X.transpose();
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double v = kernel_value(kernel, Xt.col(a), Xt.col(b));
      K(a, b) = v;
      K(b, a) = v;
    }
  }
  return K;
}

namespace {

// Σ_i min(run_i, K) where run_i is the length of agreement starting at i.
double shared_kmers(const std::string& a, const std::string& b, std::size_t max_degree) {
  std::size_t run = 0;
  double total = 0.0;
  for (std::size_t i = a.size(); i-- > 0;) {
    run = a[i] == b[i] ? run + 1 : 0;
    total += static_cast<double>(std::min(run, max_degree));
  }
  return total;
}

}  // namespace

Eigen::MatrixXd kmer_gram_matrix(const std::vector<std::string>& sequences,
                                 std::size_t max_degree) {
  const auto n = static_cast<Eigen::Index>(sequences.size());
  Eigen::MatrixXd K(n, n);
#pragma omp parallel for schedule(dynamic, 8)
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double v = shared_kmers(sequences[a], sequences[b], max_degree);
      K(a, b) = v;
      K(b, a) = v;
    }
  }
  return K;
}

namespace reference {

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      K(a, b) = kernel_value(kernel, X.row(a).transpose(), X.row(b).transpose());
  return K;
}

// Counts shared (position, substring) features by direct comparison.
Eigen::MatrixXd kmer_gram_matrix(const std::vector<std::string>& sequences,
                                 std::size_t max_degree) {
  const auto n = static_cast<Eigen::Index>(sequences.size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const auto& x = sequences[a];
      const auto& z = sequences[b];
      double count = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t k = 1; k <= max_degree && i + k <= x.size(); ++k)
          if (x.compare(i, k, z, i, k) == 0) count += 1.0;
      K(a, b) = count;
    }
  }
  return K;
}

}  // namespace reference

}  // namespace firm
