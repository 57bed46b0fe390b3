#pragma once

// Data-parallel inner loops. Each kernel has a straightforward serial twin in
// firm::reference that tests and the benchmark compare against.

#include "firm/scoring.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace firm {

/// K_ab = k(x_a, x_b) over the rows of X.
Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X);

/// K_ab = number of positional substrings of length ≤ max_degree shared by
/// sequences a and b at the same position.
Eigen::MatrixXd kmer_gram_matrix(const std::vector<std::string>& sequences,
                                 std::size_t max_degree);

/// Per-column binary FIRM of ±1 data under the empirical distribution:
/// (q_+ − q_-)·√(p_+ p_-). Throws on a single-valued column.
Eigen::VectorXd binary_column_firm(const Eigen::MatrixXd& X, const Eigen::VectorXd& scores);

namespace reference {

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X);
Eigen::MatrixXd kmer_gram_matrix(const std::vector<std::string>& sequences,
                                 std::size_t max_degree);
Eigen::VectorXd binary_column_firm(const Eigen::MatrixXd& X, const Eigen::VectorXd& scores);

}  // namespace reference

}  // namespace firm
