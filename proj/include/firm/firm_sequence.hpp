#pragma once

#include "firm/dataset.hpp"
#include "firm/scoring.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace firm {

/// Order-0 background: letters drawn independently per position.
struct MarkovBackground {
  std::string alphabet = kDnaAlphabet;
  std::vector<double> letter_prob;

  static MarkovBackground uniform(std::string alphabet = kDnaAlphabet);
  /// Letter frequencies pooled over all positions of the data.
  static MarkovBackground fitted(const SequenceDataset& data);

  void validate() const;
  std::size_t symbol(char c) const;
  /// Π letter_prob over the letters of `oligomer`.
  double probability(std::string_view oligomer) const;
};

inline constexpr std::uint64_t kDefaultPoimBudget = 10'000'000;

/// Q'(z, j) = E[s | X[j..j+k) = z] − E[s] and its FIRM rescaling
/// Q(z, j) = Q'(z, j)·√((1 − p_z)/p_z) for every z ∈ Σ^k, j ∈ [0, L − k].
/// Oligomers are indexed in base |Σ| with the first letter most significant.
struct PoimTable {
  std::string alphabet;
  std::size_t k = 0;
  std::size_t length = 0;
  std::vector<double> values;
  std::vector<double> firm_values;

  std::size_t positions() const { return length - k + 1; }
  std::size_t oligomers() const;
  std::size_t index(std::size_t code, std::size_t position) const {
    return position * oligomers() + code;
  }
  std::size_t encode(std::string_view oligomer) const;
  std::string decode(std::size_t code) const;

  double value(std::string_view oligomer, std::size_t position) const;
  double firm_value(std::string_view oligomer, std::size_t position) const;
};

/// E[s(X)] = b + Σ w_{y,i} P(y).
double expected_score(const PositionalKmerScorer& scorer, const MarkovBackground& bg);

/// E[s(X) | X[j..j+|z|) = z], exact under the order-0 background.
double conditional_expected_score(const PositionalKmerScorer& scorer,
                                  const MarkovBackground& bg, std::string_view z,
                                  std::size_t j);

/// Fills a k-mer table; cells are computed in parallel. k may exceed the
/// scorer's maximum degree. Throws when |Σ|^k·(L−k+1) exceeds `budget`.
PoimTable poim(const PositionalKmerScorer& scorer, const MarkovBackground& bg, std::size_t k,
               std::uint64_t budget = kDefaultPoimBudget);

struct RankedOligomer {
  std::string oligomer;
  std::size_t position = 0;
  double q = 0.0;
};

/// Descending |Q|; ties broken by (position, oligomer).
std::vector<RankedOligomer> ranked_oligomers(const PoimTable& table, std::size_t top);

/// Columns: k, j, z, Q', Q (j 0-based).
void write_poim_tsv(std::ostream& out, const PoimTable& table);
/// Columns: j, max_z |Q|, mean_z |Q|.
void write_poim_summary_tsv(std::ostream& out, const PoimTable& table);

namespace reference {

/// Direct evaluation of both expectations for every cell, one at a time.
PoimTable poim(const PositionalKmerScorer& scorer, const MarkovBackground& bg, std::size_t k,
               std::uint64_t budget = kDefaultPoimBudget);

}  // namespace reference

}  // namespace firm
