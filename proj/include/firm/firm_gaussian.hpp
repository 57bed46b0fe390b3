#pragma once

#include "firm/dataset.hpp"
#include "firm/result.hpp"
#include "firm/scoring.hpp"

#include <Eigen/Dense>

#include <vector>

namespace firm {

/// Normal input model. Inputs are treated in centered coordinates; `mean`
/// records where the original data were centered, and scorers are expanded
/// around it.
struct GaussianModel {
  CovarianceEstimate sigma;
  Eigen::VectorXd mean;

  Eigen::Index dim() const { return sigma.sigma.rows(); }
};

/// Zero-mean model around a covariance estimate.
GaussianModel make_gaussian_model(CovarianceEstimate sigma);
GaussianModel make_gaussian_model(CovarianceEstimate sigma, Eigen::VectorXd mean);

enum class CovarianceChoice { automatic, empirical, shrunk };

/// Centers the data and estimates Σ. `automatic` shrinks when n < 2d.
GaussianModel fit_gaussian_model(const TabularDataset& data,
                                 CovarianceChoice choice = CovarianceChoice::automatic);

/// E[X | X_j = t] = (t / Σ_jj) Σ_{j•}, in centered coordinates.
Eigen::VectorXd conditional_mean(const GaussianModel& model, Eigen::Index j, double t);

/// First-order FIRM: q_signed_j = Σ_{j•}ᵀ g / √Σ_jj with g = ∂s/∂x at the
/// model mean. Exact for linear scorers.
std::vector<FirmResult> firm_gaussian_general(const Scorer& scorer, const GaussianModel& model);

/// Q = D⁻¹ Σ w with D = diag(√Σ_jj).
std::vector<FirmResult> firm_gaussian_linear(const Eigen::VectorXd& w, double b,
                                             const GaussianModel& model);

/// I_j = √(mean_i (∂s/∂x_j |x_i)² · Var(X_j)) over the data rows, with the
/// population variance.
Eigen::VectorXd sensitivity_index(const Scorer& scorer, const TabularDataset& data);
std::vector<FirmResult> sensitivity_results(const Scorer& scorer, const TabularDataset& data);

/// Q = D⁻¹ Σ (n Σ̂)⁻¹ Xcᵀ y for the least-squares scorer fitted to (X, y),
/// where Xc are the centered columns and Σ̂ = XcᵀXc / n.
std::vector<FirmResult> firm_regression_closed_form(const Eigen::MatrixXd& X,
                                                    const Eigen::VectorXd& y,
                                                    const GaussianModel& model);

}  // namespace firm
