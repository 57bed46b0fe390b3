#include "firm/firm_binary.hpp"
#include "firm/io.hpp"

#include <cmath>
#include <stdexcept>

namespace firm {

PointDistribution PointDistribution::empirical(const Eigen::MatrixXd& X) {
  if (X.rows() == 0) throw std::invalid_argument("empirical distribution needs at least one row");
  return {X, Eigen::VectorXd::Constant(X.rows(), 1.0 / static_cast<double>(X.rows()))};
}

PointDistribution PointDistribution::uniform_cube(Eigen::Index dim) {
  if (dim < 1 || dim > 24) throw std::invalid_argument("uniform cube dimension must be in [1, 24]");
  const Eigen::Index n = Eigen::Index{1} << dim;
  PointDistribution dist;
  dist.points.resize(n, dim);
  // Row r encodes r in binary, most significant bit in column 0; bit 1 -> +1.
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index j = 0; j < dim; ++j)
      dist.points(r, j) = ((r >> (dim - 1 - j)) & 1) ? 1.0 : -1.0;
  dist.prob = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  return dist;
}

FirmResult firm_binary_from_values(std::string feature, const Eigen::VectorXd& scores,
                                   const Eigen::VectorXd& fvals, const Eigen::VectorXd& probs) {
  if (scores.size() != fvals.size() || probs.size() != fvals.size()) {
    throw std::invalid_argument("scores, feature values and probabilities differ in length");
  }
  auto support = binary_support(fvals, probs);
  if (!support) throw std::invalid_argument("feature " + feature + " takes more than two values");
  if (support->degenerate()) {
    throw std::invalid_argument("degenerate feature " + feature + ": constant value " +
                                io::format_double(support->low));
  }
  double mass_a = 0.0, mass_b = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (Eigen::Index i = 0; i < fvals.size(); ++i) {
    if (!(probs(i) > 0.0)) continue;
    if (fvals(i) == support->high) {
      mass_a += probs(i);
      sum_a += probs(i) * scores(i);
    } else {
      mass_b += probs(i);
      sum_b += probs(i) * scores(i);
    }
  }
  BinaryExtras ex;
  ex.q_a = sum_a / mass_a;
  ex.q_b = sum_b / mass_b;
  ex.p_a = support->p_high;
  ex.p_b = support->p_low;
  FirmResult r = make_result(std::move(feature), (ex.q_a - ex.q_b) * std::sqrt(ex.p_a * ex.p_b),
                             FirmMethod::binary_exact);
  r.extras = ex;
  return r;
}

FirmResult firm_binary_exact(const Scorer& scorer, const FeatureFunction& f,
                             const PointDistribution& dist) {
  validate_feature(f, dist.points.cols());
  return firm_binary_from_values(feature_name(f), score_rows(scorer, dist.points),
                                 evaluate_all(f, dist.points), dist.prob);
}

BinaryMatrixScaling binary_matrix_scaling(const Eigen::MatrixXd& X) {
  const auto n = static_cast<double>(X.rows());
  BinaryMatrixScaling s{Eigen::VectorXd(X.cols()), Eigen::VectorXd(X.cols())};
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double n_pos = 0.0, n_neg = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (X(i, j) == 1.0) {
        n_pos += 1.0;
      } else if (X(i, j) == -1.0) {
        n_neg += 1.0;
      } else {
        throw std::invalid_argument("entry (" + std::to_string(i + 1) + ", " +
                                    std::to_string(j + 1) + ") is not +1 or -1");
      }
    }
    if (n_pos == 0.0 || n_neg == 0.0) {
      throw std::invalid_argument("column " + std::to_string(j + 1) + " is single-valued");
    }
    const double root = std::sqrt(n_pos * n_neg);
    s.d1(j) = 1.0 / (2.0 * root);
    // Sign chosen so that the rows of M weight each group by ±√(n+n−)/(n·n±),
    // which is what makes MᵀXw equal (q₊ − q₋)√(p₊p₋) and cancels the bias.
    s.d0(j) = (n_neg - n_pos) / (2.0 * n * root);
  }
  return s;
}

std::vector<FirmResult> firm_binary_empirical_matrix(const Eigen::MatrixXd& X,
                                                     const Eigen::VectorXd& w, double /*b*/) {
  if (w.size() != X.cols()) throw std::invalid_argument("weight vector does not match columns");
  const auto scaling = binary_matrix_scaling(X);
  const Eigen::VectorXd s = X * w;
  // Q = MᵀXw with M = 1 D0 + X D1; the bias term is annihilated by Mᵀ1 = 0.
  const Eigen::VectorXd q = scaling.d0 * s.sum() + scaling.d1.cwiseProduct(X.transpose() * s);
  std::vector<FirmResult> out;
  out.reserve(static_cast<std::size_t>(X.cols()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    out.push_back(make_result("x" + std::to_string(j + 1), q(j), FirmMethod::binary_matrix));
  }
  return out;
}

FirmResult firm_uniform_conjunction(const Eigen::VectorXd& w, double b,
                                    const std::vector<Literal>& literals) {
  SignedConjunction conj{literals};
  validate_feature(conj, w.size());
  if (literals.size() > 60) throw std::invalid_argument("too many literals");
  const double p = std::ldexp(1.0, -static_cast<int>(literals.size()));
  double signed_sum = 0.0;
  for (const auto& l : literals) signed_sum += l.positive ? w(l.index) : -w(l.index);

  BinaryExtras ex;
  ex.q_a = b + signed_sum;
  ex.q_b = b - signed_sum * p / (1.0 - p);
  ex.p_a = p;
  ex.p_b = 1.0 - p;
  FirmResult r = make_result(feature_name(conj), signed_sum * std::sqrt(p / (1.0 - p)),
                             FirmMethod::uniform_closed_form);
  r.extras = ex;
  return r;
}

double poim_firm_conversion(double q_prime, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("probability must lie strictly in (0, 1)");
  return q_prime * std::sqrt((1.0 - p) / p);
}

}  // namespace firm
