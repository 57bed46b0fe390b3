#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace firm {

enum class FirmMethod {
  binary_exact,
  binary_matrix,
  uniform_closed_form,
  gaussian_taylor,
  gaussian_linear,
  regression_closed_form,
  empirical_binned,
  slope,
  sensitivity,
  poim,
};

std::string_view to_string(FirmMethod method);

/// Conditional means and value probabilities behind a binary importance.
/// `a` is always the larger of the two feature values.
struct BinaryExtras {
  double q_a = 0.0;
  double q_b = 0.0;
  double p_a = 0.0;
  double p_b = 0.0;
};

/// Importance of one feature. `q_signed` keeps the direction of the effect
/// on the score; `q_abs` is its magnitude.
struct FirmResult {
  std::string feature;
  double q_signed = 0.0;
  double q_abs = 0.0;
  FirmMethod method = FirmMethod::binary_exact;
  std::optional<BinaryExtras> extras;
  /// Q divided by the standard deviation of the score, when requested.
  std::optional<double> q_standardized;
};

FirmResult make_result(std::string feature, double q_signed, FirmMethod method);

}  // namespace firm
