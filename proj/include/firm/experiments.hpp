#pragma once

#include "firm/dataset.hpp"
#include "firm/features.hpp"
#include "firm/firm_empirical.hpp"
#include "firm/firm_sequence.hpp"
#include "firm/io.hpp"
#include "firm/result.hpp"
#include "firm/scoring.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace firm {

/// 1 + number of results whose q_signed exceeds results[i] by more than
/// `tolerance` (relative to the larger magnitude). Ties share a rank.
std::size_t descending_rank(const std::vector<FirmResult>& results, std::size_t i,
                            double tolerance = 1e-9);
std::size_t ascending_rank(const std::vector<FirmResult>& results, std::size_t i,
                           double tolerance = 1e-9);

// Boolean formula x1 ∨ (¬x1 ∧ ¬x2) over (x1, x2, x3) ∈ {-1,+1}³.

struct BooleanExperimentConfig {
  double lambda = 1e-3;
  int degree = 2;
  double offset = 1.0;
};

struct BooleanExperimentResult {
  TabularDataset table;
  KernelExpansionScorer scorer;
  std::vector<FeatureFunction> singles;  // x_j and ¬x_j
  std::vector<FeatureFunction> pairs;    // all 12 signed pair conjunctions
  std::vector<FirmResult> trained_singles;
  std::vector<FirmResult> trained_pairs;
  std::vector<FirmResult> oracle_singles;
  std::vector<FirmResult> oracle_pairs;
  /// Coefficients of x1, x2, x3, x1x2, x1x3, x2x3 in the trained scorer.
  std::vector<std::pair<std::string, double>> monomial_weights;
};

TabularDataset boolean_truth_table();
BooleanExperimentResult run_boolean_experiment(const BooleanExperimentConfig& config = {});
void write_boolean_artifacts(io::StagedOutput& out, const BooleanExperimentResult& result);

// Two 3-D Gaussian classes; dimension 2 is the most discriminative,
// dimension 1 less so, dimension 3 is noise.

struct GaussianExperimentConfig {
  std::size_t n_per_class = 2000;
  std::uint64_t seed = 1;
  Eigen::Vector3d class_mean{0.5, 1.5, 0.0};
  std::size_t bins = 32;
};

struct GaussianExperimentResult {
  TabularDataset data;
  LinearScorer scorer;
  std::vector<FirmResult> slope;
  std::vector<double> slope_standard_error;
  std::vector<FirmResult> binned;
  std::vector<ConditionalScoreCurve> curves;
};

GaussianExperimentResult run_gaussian_experiment(const GaussianExperimentConfig& config);
void write_gaussian_artifacts(io::StagedOutput& out, const GaussianExperimentResult& result,
                              const GaussianExperimentConfig& config);

// Planted-motif DNA sequences.

struct SequenceExperimentConfig {
  std::size_t n_per_class = 500;
  std::size_t length = 50;
  std::size_t max_degree = 3;
  double center = 25.0;
  double sd = 7.0;
  double lambda = 1e-2;
  std::string motif = "GATTACA";
  std::uint64_t seed = 1;
  std::uint64_t budget = kDefaultPoimBudget;
};

/// Per-position importance of the motif, the mean over its Hamming-distance
/// 1 and 2 neighbours, and the mean ± sd band of strings disagreeing with
/// the motif at every position.
struct PositionalSeries {
  std::vector<double> exact;
  std::vector<double> edit1_mean;
  std::vector<double> edit2_mean;
  std::vector<double> irrelevant_mean;
  std::vector<double> irrelevant_sd;
};

struct SequenceExperimentResult {
  SequenceDataset data;
  std::vector<std::size_t> planted_positions;
  PositionalKmerScorer scorer;
  PoimTable table;
  PositionalSeries firm;
  PositionalSeries weights;
};

/// Positives carry the motif at round(N(center, sd)) clamped to
/// [0, L − |motif|], with one uniformly chosen motif position replaced by a
/// uniform random letter. Negatives are uniform random.
SequenceDataset generate_motif_sequences(const SequenceExperimentConfig& config,
                                         std::mt19937_64& rng,
                                         std::vector<std::size_t>* planted = nullptr);

/// Largest |w_{y,i}| over the scored substrings y of z inside its window.
double raw_weight_importance(const PositionalKmerScorer& scorer, std::string_view z,
                             std::size_t position);

/// Evaluates `value(z, j)` for the motif and its neighbourhood classes at
/// every table position.
PositionalSeries positional_series(
    const PoimTable& table, std::string_view motif,
    const std::function<double(std::string_view, std::size_t)>& value);

SequenceExperimentResult run_sequence_experiment(const SequenceExperimentConfig& config);
void write_sequence_artifacts(io::StagedOutput& out, const SequenceExperimentResult& result,
                              const SequenceExperimentConfig& config);

}  // namespace firm
