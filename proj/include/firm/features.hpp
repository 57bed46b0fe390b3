#pragma once

#include "firm/dataset.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace firm {

// Indices are 0-based in the library. The string form used on the command
// line (`x3`, `and(+1,-2)`, `kmer(GAT@4)`) is 1-based.

struct Projection {
  std::size_t index = 0;
};

struct Literal {
  std::size_t index = 0;
  bool positive = true;
};

/// 1 iff every literal matches: x_index = +1 for positive, -1 for negated.
struct SignedConjunction {
  std::vector<Literal> literals;
};

struct Xor {
  std::size_t first = 0;
  std::size_t second = 1;
};

struct Threshold {
  std::size_t index = 0;
  double tau = 0.0;
};

struct PositionalOligomer {
  std::string oligomer;
  std::size_t position = 0;
};

using FeatureFunction =
    std::variant<Projection, SignedConjunction, Xor, Threshold, PositionalOligomer>;

bool is_sequence_feature(const FeatureFunction& f);

/// Throws std::invalid_argument when an index falls outside `dim` columns
/// (or the oligomer window outside `length` positions).
void validate_feature(const FeatureFunction& f, Eigen::Index dim);
void validate_feature(const FeatureFunction& f, std::size_t length, std::string_view alphabet);

double evaluate(const FeatureFunction& f, const Eigen::Ref<const Eigen::VectorXd>& x);
double evaluate(const FeatureFunction& f, std::string_view x);

Eigen::VectorXd evaluate_all(const FeatureFunction& f, const Eigen::MatrixXd& X);
Eigen::VectorXd evaluate_all(const FeatureFunction& f, const TabularDataset& data);
Eigen::VectorXd evaluate_all(const FeatureFunction& f, const SequenceDataset& data);

/// Observed support of a feature with at most two values. For a constant
/// feature `low == high` and `degenerate()` holds.
struct BinarySupport {
  double low = 0.0;
  double high = 0.0;
  double p_low = 0.0;
  double p_high = 0.0;

  bool degenerate() const { return low == high; }
};

/// Support of feature values under point probabilities (uniform when empty).
std::optional<BinarySupport> binary_support(const Eigen::VectorXd& fvals,
                                            const Eigen::VectorXd& probs = {});
std::optional<BinarySupport> is_binary(const FeatureFunction& f, const TabularDataset& data);
std::optional<BinarySupport> is_binary(const FeatureFunction& f, const SequenceDataset& data);

FeatureFunction parse_feature(std::string_view text);
std::string feature_name(const FeatureFunction& f);

/// Projections onto every column, in order.
std::vector<FeatureFunction> all_projections(Eigen::Index dim);

}  // namespace firm
