#include "firm/firm_binary.hpp"
#include "firm/firm_sequence.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace firm {

namespace detail {
PoimTable empty_poim_table(const PositionalKmerScorer& scorer, const MarkovBackground& bg,
                           std::size_t k, std::uint64_t budget);
void fill_firm_values(PoimTable& table, const MarkovBackground& bg);
}  // namespace detail

namespace {

// A weight restricted to one window: the letters it pins inside the window
// and the probability of its letters outside it.
struct WindowTerm {
  double weight = 0.0;
  double prob = 0.0;
  double outside = 1.0;
  std::vector<std::pair<std::size_t, std::size_t>> pinned;  // (offset in z, symbol)
};

struct Weight {
  std::size_t position = 0;
  std::vector<std::size_t> symbols;
  double weight = 0.0;
  double prob = 1.0;
};

std::vector<Weight> flatten(const PositionalKmerScorer& scorer, const MarkovBackground& bg) {
  std::vector<Weight> out;
  for (std::size_t i = 0; i < scorer.weights.size(); ++i) {
    for (const auto& [kmer, w] : scorer.weights[i]) {
      if (w == 0.0) continue;
      Weight e;
      e.position = i;
      e.weight = w;
      for (char c : kmer) {
        e.symbols.push_back(bg.symbol(c));
        e.prob *= bg.letter_prob[e.symbols.back()];
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

}  // namespace

PoimTable poim(const PositionalKmerScorer& scorer, const MarkovBackground& bg, std::size_t k,
               std::uint64_t budget) {
  PoimTable table = detail::empty_poim_table(scorer, bg, k, budget);
  const auto weights = flatten(scorer, bg);
  const std::size_t sigma = bg.alphabet.size();
  const std::size_t n_olig = table.oligomers();
  const auto n_pos = static_cast<long>(table.positions());

#pragma omp parallel for schedule(dynamic)
  for (long jl = 0; jl < n_pos; ++jl) {
    const auto j = static_cast<std::size_t>(jl);
    // Weights that do not overlap [j, j+k) have equal conditional and
    // unconditional expectation and cancel from Q'.
    std::vector<WindowTerm> terms;
    for (const auto& e : weights) {
      const std::size_t end = e.position + e.symbols.size();
      if (end <= j || e.position >= j + k) continue;
      WindowTerm t;
      t.weight = e.weight;
      t.prob = e.prob;
      for (std::size_t m = 0; m < e.symbols.size(); ++m) {
        const std::size_t p = e.position + m;
        if (p >= j && p < j + k) {
          t.pinned.emplace_back(p - j, e.symbols[m]);
        } else {
          t.outside *= bg.letter_prob[e.symbols[m]];
        }
      }
      terms.push_back(std::move(t));
    }

    std::vector<std::size_t> z(k, 0);
    for (std::size_t code = 0; code < n_olig; ++code) {
      std::size_t rest = code;
      for (std::size_t m = k; m-- > 0;) {
        z[m] = rest % sigma;
        rest /= sigma;
      }
      double q = 0.0;
      for (const auto& t : terms) {
        bool agree = true;
        for (const auto& [off, sym] : t.pinned) {
          if (z[off] != sym) {
            agree = false;
            break;
          }
        }
        q += t.weight * ((agree ? t.outside : 0.0) - t.prob);
      }
      table.values[table.index(code, j)] = q;
    }
  }
  detail::fill_firm_values(table, bg);
  return table;
}

namespace reference {

PoimTable poim(const PositionalKmerScorer& scorer, const MarkovBackground& bg, std::size_t k,
               std::uint64_t budget) {
  PoimTable table = detail::empty_poim_table(scorer, bg, k, budget);
  const double unconditional = expected_score(scorer, bg);
  for (std::size_t j = 0; j < table.positions(); ++j) {
    for (std::size_t code = 0; code < table.oligomers(); ++code) {
      table.values[table.index(code, j)] =
          conditional_expected_score(scorer, bg, table.decode(code), j) - unconditional;
    }
  }
  detail::fill_firm_values(table, bg);
  return table;
}

}  // namespace reference

}  // namespace firm
