#pragma once

#include "firm/dataset.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace firm {

/// exp(-‖x - x'‖² / γ²)
struct GaussianKernel {
  double gamma = 1.0;
};

/// (xᵀx' + offset)^degree
struct PolynomialKernel {
  int degree = 2;
  double offset = 1.0;
};

using KernelSpec = std::variant<GaussianKernel, PolynomialKernel>;

void validate(const KernelSpec& kernel);
double kernel_value(const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& z);
/// ∂k(x, z)/∂x.
Eigen::VectorXd kernel_gradient(const KernelSpec& kernel,
                                const Eigen::Ref<const Eigen::VectorXd>& x,
                                const Eigen::Ref<const Eigen::VectorXd>& z);

struct LinearScorer {
  Eigen::VectorXd w;
  double b = 0.0;
};

/// s(x) = Σ_i alpha_i k(points_i, x) + b, label factors folded into alpha.
struct KernelExpansionScorer {
  Eigen::MatrixXd points;
  Eigen::VectorXd alpha;
  double b = 0.0;
  KernelSpec kernel;
};

/// Scores looked up by exact input row. Duplicate rows carry the mean of
/// their labels, which leaves every conditional mean over rows unchanged.
struct LabelOracleScorer {
  std::map<std::vector<double>, double> table;
  Eigen::Index dim = 0;
};

/// s(x) = Σ w_{y,i} 1[x[i..i+|y|) = y] + b. `weights[i]` maps each substring
/// starting at position i to its weight.
struct PositionalKmerScorer {
  std::string alphabet = kDnaAlphabet;
  std::size_t length = 0;
  std::size_t max_degree = 1;
  std::vector<std::map<std::string, double, std::less<>>> weights;
  double b = 0.0;

  double weight(std::size_t position, std::string_view kmer) const;
  std::size_t weight_count() const;
};

using Scorer = std::variant<LinearScorer, KernelExpansionScorer, LabelOracleScorer,
                            PositionalKmerScorer>;

std::string_view scorer_type(const Scorer& scorer);

/// Input dimension for tabular scorers; throws for the sequence scorer.
Eigen::Index input_dimension(const Scorer& scorer);

double score(const LinearScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x);
double score(const KernelExpansionScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x);
double score(const LabelOracleScorer& s, const Eigen::Ref<const Eigen::VectorXd>& x);
double score(const PositionalKmerScorer& s, std::string_view x);
double score(const Scorer& s, const Eigen::Ref<const Eigen::VectorXd>& x);
double score(const Scorer& s, std::string_view x);

/// Scores of every row (or sequence) of a dataset.
Eigen::VectorXd score_rows(const Scorer& s, const Eigen::MatrixXd& X);
Eigen::VectorXd score_all(const Scorer& s, const TabularDataset& data);
Eigen::VectorXd score_all(const Scorer& s, const SequenceDataset& data);

bool is_differentiable(const Scorer& s);
/// Analytic ∂s/∂x at x; linear and kernel-expansion scorers only.
Eigen::VectorXd gradient(const Scorer& s, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd gradient_at_zero(const Scorer& s);

/// Least squares with an unpenalized bias column.
LinearScorer train_least_squares(const TabularDataset& data);
/// w = (XcᵀXc + nλI)⁻¹ Xcᵀ y on centered columns; the bias is unpenalized.
LinearScorer train_ridge(const TabularDataset& data, double lambda);
/// alpha = (K + nλI)⁻¹ (y − ȳ), b = ȳ.
KernelExpansionScorer train_kernel_ridge(const TabularDataset& data, const KernelSpec& kernel,
                                         double lambda);
/// Same closed form on the explicit positional k-mer feature map, solved in
/// the dual and unfolded into sparse per-position weights.
PositionalKmerScorer train_positional_kmer(const SequenceDataset& data, std::size_t max_degree,
                                           double lambda);
LabelOracleScorer make_label_oracle(const TabularDataset& data);

/// Population standard deviation of the scores over the data.
double score_sd(const Scorer& s, const TabularDataset& data);
double score_sd(const Scorer& s, const SequenceDataset& data);
/// Multiplies every score (bias included) by `factor`.
Scorer scale(const Scorer& s, double factor);
/// Divides every score by its standard deviation over the data.
Scorer standardize(const Scorer& s, const TabularDataset& data);
Scorer standardize(const Scorer& s, const SequenceDataset& data);

/// JSON form: {"type": ..., "parameters": {...}}; see README for fields.
nlohmann::json to_json(const Scorer& s);
Scorer scorer_from_json(const nlohmann::json& doc);

}  // namespace firm
