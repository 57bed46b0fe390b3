#pragma once

#include "firm/result.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace firm {

/// Binned estimate of the conditional expected score q_f(t).
struct ConditionalScoreCurve {
  std::vector<double> bin_edges;  // bins + 1, increasing
  std::vector<double> bin_prob;
  std::vector<double> q_hat;
  std::vector<std::size_t> counts;

  std::size_t bins() const { return q_hat.size(); }
};

/// max(5, ⌊√n⌋) capped at 64, and never more than n.
std::size_t default_bin_count(std::size_t n);

/// Equal-count bins over the feature values; ties at a boundary are kept
/// together, merging bins where needed. When the feature has no more than
/// `bins` distinct values, each value gets its own bin.
ConditionalScoreCurve conditional_curve(const Eigen::VectorXd& scores,
                                        const Eigen::VectorXd& fvals, std::size_t bins);

/// Standard deviation of q_hat under bin_prob. Two-bin curves are signed
/// (upper bin minus lower bin); otherwise q_signed = q_abs.
FirmResult firm_from_curve(const ConditionalScoreCurve& curve, std::string feature = {});

/// Q = w_f · sd(f) from the least-squares line score ≈ w_f t + c_f.
FirmResult firm_slope(const Eigen::VectorXd& scores, const Eigen::VectorXd& fvals,
                      std::string feature = {});

/// Standard error of firm_slope's Q (slope standard error times sd(f)).
double firm_slope_standard_error(const Eigen::VectorXd& scores, const Eigen::VectorXd& fvals);

/// Columns: bin_lo, bin_hi, prob, q_hat, count.
void write_curve_tsv(std::ostream& out, const ConditionalScoreCurve& curve);

}  // namespace firm
