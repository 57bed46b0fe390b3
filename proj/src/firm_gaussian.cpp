#include "firm/firm_gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace firm {

GaussianModel make_gaussian_model(CovarianceEstimate sigma) {
  const auto d = sigma.sigma.rows();
  return make_gaussian_model(std::move(sigma), Eigen::VectorXd::Zero(d));
}

GaussianModel make_gaussian_model(CovarianceEstimate sigma, Eigen::VectorXd mean) {
  if (sigma.sigma.rows() != sigma.sigma.cols()) throw std::invalid_argument("covariance must be square");
  if (mean.size() != sigma.sigma.rows()) throw std::invalid_argument("mean does not match covariance");
  return {std::move(sigma), std::move(mean)};
}

GaussianModel fit_gaussian_model(const TabularDataset& data, CovarianceChoice choice) {
  if (choice == CovarianceChoice::automatic) {
    choice = data.rows() < 2 * data.cols() ? CovarianceChoice::shrunk : CovarianceChoice::empirical;
  }
  auto sigma = choice == CovarianceChoice::shrunk ? shrinkage_covariance(data)
                                                  : empirical_covariance(data, true);
  return make_gaussian_model(std::move(sigma), data.column_means);
}

namespace {

double variance_at(const GaussianModel& model, Eigen::Index j) {
  if (j < 0 || j >= model.dim()) throw std::out_of_range("feature index out of range");
  const double v = model.sigma.sigma(j, j);
  if (!(v > 0.0)) {
    throw std::invalid_argument("zero variance at feature " + std::to_string(j + 1));
  }
  return v;
}

// q_j = Σ_{j•}ᵀ g / √Σ_jj for every j.
std::vector<FirmResult> covariance_weighted(const GaussianModel& model, const Eigen::VectorXd& g,
                                            FirmMethod method) {
  if (g.size() != model.dim()) throw std::invalid_argument("gradient does not match model dimension");
  std::vector<FirmResult> out;
  out.reserve(static_cast<std::size_t>(model.dim()));
  for (Eigen::Index j = 0; j < model.dim(); ++j) {
    const double v = variance_at(model, j);
    const double q = model.sigma.sigma.col(j).dot(g) / std::sqrt(v);
    out.push_back(make_result("x" + std::to_string(j + 1), q, method));
  }
  return out;
}

}  // namespace

Eigen::VectorXd conditional_mean(const GaussianModel& model, Eigen::Index j, double t) {
  const double v = variance_at(model, j);
  return (t / v) * model.sigma.sigma.col(j);
}

std::vector<FirmResult> firm_gaussian_general(const Scorer& scorer, const GaussianModel& model) {
  return covariance_weighted(model, gradient(scorer, model.mean), FirmMethod::gaussian_taylor);
}

std::vector<FirmResult> firm_gaussian_linear(const Eigen::VectorXd& w, double /*b*/,
                                             const GaussianModel& model) {
  return covariance_weighted(model, w, FirmMethod::gaussian_linear);
}

Eigen::VectorXd sensitivity_index(const Scorer& scorer, const TabularDataset& data) {
  const auto n = data.rows();
  const auto d = data.cols();
  Eigen::VectorXd mean_sq = Eigen::VectorXd::Zero(d);
  if (std::holds_alternative<LinearScorer>(scorer)) {
    mean_sq = std::get<LinearScorer>(scorer).w.array().square();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) {
      mean_sq += gradient(scorer, data.X.row(i).transpose()).array().square().matrix();
    }
    mean_sq /= static_cast<double>(n);
  }
  const Eigen::ArrayXd var =
      (data.X.rowwise() - data.X.colwise().mean()).array().square().colwise().mean().transpose();
  return (mean_sq.array() * var).sqrt().matrix();
}

std::vector<FirmResult> sensitivity_results(const Scorer& scorer, const TabularDataset& data) {
  const Eigen::VectorXd idx = sensitivity_index(scorer, data);
  std::vector<FirmResult> out;
  for (Eigen::Index j = 0; j < idx.size(); ++j) {
    out.push_back(make_result(data.names[static_cast<std::size_t>(j)], idx(j),
                              FirmMethod::sensitivity));
  }
  return out;
}

std::vector<FirmResult> firm_regression_closed_form(const Eigen::MatrixXd& X,
                                                    const Eigen::VectorXd& y,
                                                    const GaussianModel& model) {
  if (y.size() != X.rows()) throw std::invalid_argument("label count does not match rows");
  if (X.cols() != model.dim()) throw std::invalid_argument("data do not match model dimension");
  const Eigen::MatrixXd Xc = X.rowwise() - X.colwise().mean();
  const Eigen::MatrixXd scatter = Xc.transpose() * Xc;  // n Σ̂
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scatter);
  if (qr.rank() < X.cols()) throw std::invalid_argument("singular empirical covariance");
  const Eigen::VectorXd beta = qr.solve(Xc.transpose() * y);
  return covariance_weighted(model, beta, FirmMethod::regression_closed_form);
}

}  // namespace firm
