#include "firm/firm_empirical.hpp"
#include "firm/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace firm {

std::size_t default_bin_count(std::size_t n) {
  const auto root = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  return std::min({std::max<std::size_t>(5, root), std::size_t{64}, std::max<std::size_t>(n, 2)});
}

ConditionalScoreCurve conditional_curve(const Eigen::VectorXd& scores,
                                        const Eigen::VectorXd& fvals, std::size_t bins) {
  const auto n = static_cast<std::size_t>(fvals.size());
  if (static_cast<std::size_t>(scores.size()) != n) {
    throw std::invalid_argument("scores and feature values differ in length");
  }
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fvals(a) < fvals(b); });
  auto value = [&](std::size_t r) { return fvals(order[r]); };
  if (value(0) == value(n - 1)) throw std::invalid_argument("constant feature");

  // Start rank of every bin after the first.
  std::vector<std::size_t> starts;
  std::size_t distinct = 1;
  for (std::size_t r = 1; r < n; ++r) distinct += value(r) != value(r - 1);
  if (distinct <= bins) {
    for (std::size_t r = 1; r < n; ++r)
      if (value(r) != value(r - 1)) starts.push_back(r);
  } else {
    std::size_t prev = 0;
    for (std::size_t b = 1; b < bins; ++b) {
      auto cut = static_cast<std::size_t>(
          std::llround(static_cast<double>(b) * static_cast<double>(n) / static_cast<double>(bins)));
      // Keep ties together: push the cut past the tie group it falls in.
      while (cut > 0 && cut < n && value(cut) == value(cut - 1)) ++cut;
      if (cut <= prev || cut >= n) continue;
      starts.push_back(cut);
      prev = cut;
    }
  }
  starts.push_back(n);

  ConditionalScoreCurve curve;
  curve.bin_edges.push_back(value(0));
  std::size_t begin = 0;
  for (std::size_t end : starts) {
    double sum = 0.0;
    for (std::size_t r = begin; r < end; ++r) sum += scores(order[r]);
    const std::size_t count = end - begin;
    curve.counts.push_back(count);
    curve.q_hat.push_back(sum / static_cast<double>(count));
    curve.bin_prob.push_back(static_cast<double>(count) / static_cast<double>(n));
    curve.bin_edges.push_back(end < n ? 0.5 * (value(end - 1) + value(end)) : value(n - 1));
    begin = end;
  }
  return curve;
}

FirmResult firm_from_curve(const ConditionalScoreCurve& curve, std::string feature) {
  if (curve.bins() == 0 || curve.bin_prob.size() != curve.bins()) {
    throw std::invalid_argument("invalid conditional score curve");
  }
  if (curve.bins() == 2) {
    const double p_b = curve.bin_prob[0], p_a = curve.bin_prob[1];
    FirmResult r = make_result(std::move(feature),
                               (curve.q_hat[1] - curve.q_hat[0]) * std::sqrt(p_a * p_b),
                               FirmMethod::empirical_binned);
    r.extras = BinaryExtras{curve.q_hat[1], curve.q_hat[0], p_a, p_b};
    return r;
  }
  double mean = 0.0;
  for (std::size_t b = 0; b < curve.bins(); ++b) mean += curve.bin_prob[b] * curve.q_hat[b];
  double var = 0.0;
  for (std::size_t b = 0; b < curve.bins(); ++b) {
    const double dev = curve.q_hat[b] - mean;
    var += curve.bin_prob[b] * dev * dev;
  }
  return make_result(std::move(feature), std::sqrt(var), FirmMethod::empirical_binned);
}

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double var_f = 0.0;
};

LineFit fit_line(const Eigen::VectorXd& scores, const Eigen::VectorXd& fvals) {
  if (scores.size() != fvals.size() || fvals.size() == 0) {
    throw std::invalid_argument("scores and feature values differ in length");
  }
  const double mf = fvals.mean();
  const double ms = scores.mean();
  const Eigen::ArrayXd df = fvals.array() - mf;
  const double var_f = df.square().mean();
  if (!(var_f > 0.0)) throw std::invalid_argument("constant feature");
  const double cov = (df * (scores.array() - ms)).mean();
  LineFit fit;
  fit.slope = cov / var_f;
  fit.intercept = ms - fit.slope * mf;
  fit.var_f = var_f;
  return fit;
}

}  // namespace

FirmResult firm_slope(const Eigen::VectorXd& scores, const Eigen::VectorXd& fvals,
                      std::string feature) {
  const LineFit fit = fit_line(scores, fvals);
  return make_result(std::move(feature), fit.slope * std::sqrt(fit.var_f), FirmMethod::slope);
}

double firm_slope_standard_error(const Eigen::VectorXd& scores, const Eigen::VectorXd& fvals) {
  const LineFit fit = fit_line(scores, fvals);
  const auto n = static_cast<double>(fvals.size());
  if (n < 3) throw std::invalid_argument("standard error needs at least 3 samples");
  const Eigen::ArrayXd resid = scores.array() - (fit.slope * fvals.array() + fit.intercept);
  const double slope_se = std::sqrt(resid.square().sum() / (n - 2.0) / (fit.var_f * n));
  return slope_se * std::sqrt(fit.var_f);
}

void write_curve_tsv(std::ostream& out, const ConditionalScoreCurve& curve) {
  out << "bin_lo\tbin_hi\tprob\tq_hat\tcount\n";
  for (std::size_t b = 0; b < curve.bins(); ++b) {
    out << io::format_double(curve.bin_edges[b]) << '\t' << io::format_double(curve.bin_edges[b + 1])
        << '\t' << io::format_double(curve.bin_prob[b]) << '\t' << io::format_double(curve.q_hat[b])
        << '\t' << curve.counts[b] << '\n';
  }
}

}  // namespace firm
