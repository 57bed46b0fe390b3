#include "firm/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace firm {

namespace {

struct ColumnSums {
  double n_pos = 0.0;
  double n_neg = 0.0;
  double s_pos = 0.0;
  double s_neg = 0.0;
};

double column_q(const ColumnSums& c, Eigen::Index j, double n) {
  if (c.n_pos == 0.0 || c.n_neg == 0.0) {
    throw std::invalid_argument("column " + std::to_string(j + 1) + " is single-valued");
  }
  return (c.s_pos / c.n_pos - c.s_neg / c.n_neg) * std::sqrt(c.n_pos * c.n_neg) / n;
}

[[noreturn]] void not_pm1(Eigen::Index i, Eigen::Index j) {
  throw std::invalid_argument("entry (" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                              ") is not +1 or -1");
}

}  // namespace

Eigen::VectorXd binary_column_firm(const Eigen::MatrixXd& X, const Eigen::VectorXd& scores) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  Eigen::VectorXd q(d);
  // Exceptions must not leave the parallel region; report the lowest failing column.
  std::vector<std::string> errors(static_cast<std::size_t>(d));
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < d; ++j) {
    try {
      ColumnSums c;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double x = X(i, j);
        if (x == 1.0) {
          c.n_pos += 1.0;
          c.s_pos += scores(i);
        } else if (x == -1.0) {
          c.n_neg += 1.0;
          c.s_neg += scores(i);
        } else {
          not_pm1(i, j);
        }
      }
      q(j) = column_q(c, j, static_cast<double>(n));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(j)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::invalid_argument(e);
  return q;
}

namespace reference {

Eigen::VectorXd binary_column_firm(const Eigen::MatrixXd& X, const Eigen::VectorXd& scores) {
  Eigen::VectorXd q(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    ColumnSums c;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      if (X(i, j) == 1.0) {
        c.n_pos += 1.0;
        c.s_pos += scores(i);
      } else if (X(i, j) == -1.0) {
        c.n_neg += 1.0;
        c.s_neg += scores(i);
      } else {
        not_pm1(i, j);
      }
    }
    q(j) = column_q(c, j, static_cast<double>(X.rows()));
  }
  return q;
}

}  // namespace reference

}  // namespace firm
