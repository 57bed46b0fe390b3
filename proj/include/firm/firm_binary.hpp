#pragma once

#include "firm/features.hpp"
#include "firm/result.hpp"
#include "firm/scoring.hpp"

#include <Eigen/Dense>

#include <vector>

namespace firm {

/// Finite distribution over explicit points (rows) with probabilities.
struct PointDistribution {
  Eigen::MatrixXd points;
  Eigen::VectorXd prob;

  /// Every row of X with probability 1/n.
  static PointDistribution empirical(const Eigen::MatrixXd& X);
  /// All 2^d points of {-1,+1}^d with probability 2^-d.
  static PointDistribution uniform_cube(Eigen::Index dim);
};

/// Q = (q_a − q_b)·√(p_a p_b) from per-point scores and feature values,
/// with `a` the larger feature value. Throws on a constant feature and on
/// more than two distinct values.
FirmResult firm_binary_from_values(std::string feature, const Eigen::VectorXd& scores,
                                   const Eigen::VectorXd& fvals, const Eigen::VectorXd& probs);

/// Exact binary FIRM of `f` under `dist`.
FirmResult firm_binary_exact(const Scorer& scorer, const FeatureFunction& f,
                             const PointDistribution& dist);

/// Diagonal scalings of the empirical matrix form Q = MᵀXw,
/// M = 1_{n×d} D0 + X D1.
struct BinaryMatrixScaling {
  Eigen::VectorXd d0;
  Eigen::VectorXd d1;
};

/// Throws std::invalid_argument naming the first single-valued column.
BinaryMatrixScaling binary_matrix_scaling(const Eigen::MatrixXd& X);

/// Importance of every ±1 input column for a linear scorer under the
/// empirical distribution of the rows of X.
std::vector<FirmResult> firm_binary_empirical_matrix(const Eigen::MatrixXd& X,
                                                     const Eigen::VectorXd& w, double b);

/// Closed form for a conjunction of m literals under uniform ±1 inputs:
/// Q = (Σ ± w_j)·√(p/(1−p)), p = 2^-m.
FirmResult firm_uniform_conjunction(const Eigen::VectorXd& w, double b,
                                    const std::vector<Literal>& literals);

/// Q = Q'·√((1−p)/p) for a binary feature taking the value of interest
/// with probability p.
double poim_firm_conversion(double q_prime, double p);

}  // namespace firm
