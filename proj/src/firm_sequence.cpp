#include "firm/firm_sequence.hpp"
#include "firm/firm_binary.hpp"
#include "firm/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace firm {

MarkovBackground MarkovBackground::uniform(std::string alphabet) {
  MarkovBackground bg;
  bg.letter_prob.assign(alphabet.size(), 1.0 / static_cast<double>(alphabet.size()));
  bg.alphabet = std::move(alphabet);
  bg.validate();
  return bg;
}

MarkovBackground MarkovBackground::fitted(const SequenceDataset& data) {
  MarkovBackground bg;
  bg.alphabet = data.alphabet;
  std::vector<double> counts(bg.alphabet.size(), 0.0);
  double total = 0.0;
  for (const auto& s : data.sequences) {
    for (char c : s) {
      counts[bg.alphabet.find(c)] += 1.0;
      total += 1.0;
    }
  }
  for (auto& c : counts) c /= total;
  bg.letter_prob = std::move(counts);
  bg.validate();
  return bg;
}

void MarkovBackground::validate() const {
  if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
  if (letter_prob.size() != alphabet.size()) {
    throw std::invalid_argument("letter probabilities do not match the alphabet");
  }
  double sum = 0.0;
  for (double p : letter_prob) {
    if (!(p > 0.0)) throw std::invalid_argument("letter probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("letter probabilities must sum to 1");
}

std::size_t MarkovBackground::symbol(char c) const {
  auto pos = alphabet.find(c);
  if (pos == std::string::npos) {
    throw std::invalid_argument(std::string("symbol ") + c + " not in alphabet");
  }
  return pos;
}

double MarkovBackground::probability(std::string_view oligomer) const {
  double p = 1.0;
  for (char c : oligomer) p *= letter_prob[symbol(c)];
  return p;
}

std::size_t PoimTable::oligomers() const {
  std::size_t n = 1;
  for (std::size_t m = 0; m < k; ++m) n *= alphabet.size();
  return n;
}

std::size_t PoimTable::encode(std::string_view oligomer) const {
  if (oligomer.size() != k) throw std::invalid_argument("oligomer length does not match table k");
  std::size_t code = 0;
  for (char c : oligomer) {
    auto pos = alphabet.find(c);
    if (pos == std::string::npos) {
      throw std::invalid_argument(std::string("symbol ") + c + " not in alphabet");
    }
    code = code * alphabet.size() + pos;
  }
  return code;
}

std::string PoimTable::decode(std::size_t code) const {
  std::string z(k, alphabet.front());
  for (std::size_t m = k; m-- > 0;) {
    z[m] = alphabet[code % alphabet.size()];
    code /= alphabet.size();
  }
  return z;
}

double PoimTable::value(std::string_view oligomer, std::size_t position) const {
  if (position >= positions()) throw std::out_of_range("position out of range");
  return values[index(encode(oligomer), position)];
}

double PoimTable::firm_value(std::string_view oligomer, std::size_t position) const {
  if (position >= positions()) throw std::out_of_range("position out of range");
  return firm_values[index(encode(oligomer), position)];
}

namespace {

void check_alphabet(const PositionalKmerScorer& scorer, const MarkovBackground& bg) {
  bg.validate();
  if (scorer.alphabet != bg.alphabet) {
    throw std::invalid_argument("scorer and background use different alphabets");
  }
}

}  // namespace

double expected_score(const PositionalKmerScorer& scorer, const MarkovBackground& bg) {
  check_alphabet(scorer, bg);
  double total = scorer.b;
  for (const auto& at : scorer.weights)
    for (const auto& [kmer, w] : at) total += w * bg.probability(kmer);
  return total;
}

double conditional_expected_score(const PositionalKmerScorer& scorer,
                                  const MarkovBackground& bg, std::string_view z,
                                  std::size_t j) {
  check_alphabet(scorer, bg);
  if (z.empty() || j + z.size() > scorer.length) {
    throw std::out_of_range("oligomer window [" + std::to_string(j) + ", " +
                            std::to_string(j + z.size()) + ") exceeds sequence length " +
                            std::to_string(scorer.length));
  }
  for (char c : z) bg.symbol(c);
  double total = scorer.b;
  for (std::size_t i = 0; i < scorer.weights.size(); ++i) {
    for (const auto& [kmer, w] : scorer.weights[i]) {
      double factor = 1.0;
      for (std::size_t m = 0; m < kmer.size() && factor != 0.0; ++m) {
        const std::size_t p = i + m;
        if (p >= j && p < j + z.size()) {
          if (kmer[m] != z[p - j]) factor = 0.0;
        } else {
          factor *= bg.letter_prob[bg.symbol(kmer[m])];
        }
      }
      total += w * factor;
    }
  }
  return total;
}

namespace detail {

PoimTable empty_poim_table(const PositionalKmerScorer& scorer, const MarkovBackground& bg,
                           std::size_t k, std::uint64_t budget) {
  check_alphabet(scorer, bg);
  if (k < 1 || k > scorer.length) {
    throw std::invalid_argument("POIM order k must be in [1, " + std::to_string(scorer.length) +
                                "]");
  }
  const std::uint64_t positions = scorer.length - k + 1;
  std::uint64_t cells = positions;
  for (std::size_t m = 0; m < k; ++m) {
    if (cells > budget) break;
    cells *= bg.alphabet.size();
  }
  if (cells > budget) {
    throw std::invalid_argument("POIM table needs " + std::to_string(cells) +
                                "+ cells, exceeding the budget of " + std::to_string(budget));
  }
  PoimTable table;
  table.alphabet = bg.alphabet;
  table.k = k;
  table.length = scorer.length;
  table.values.assign(cells, 0.0);
  table.firm_values.assign(cells, 0.0);
  return table;
}

void fill_firm_values(PoimTable& table, const MarkovBackground& bg) {
  const std::size_t n_olig = table.oligomers();
  std::vector<double> factor(n_olig);
  for (std::size_t code = 0; code < n_olig; ++code) {
    const double p = bg.probability(table.decode(code));
    factor[code] = p < 1.0 ? poim_firm_conversion(1.0, p) : 0.0;
  }
  for (std::size_t j = 0; j < table.positions(); ++j)
    for (std::size_t code = 0; code < n_olig; ++code)
      table.firm_values[table.index(code, j)] = table.values[table.index(code, j)] * factor[code];
}

}  // namespace detail

std::vector<RankedOligomer> ranked_oligomers(const PoimTable& table, std::size_t top) {
  std::vector<std::size_t> order(table.firm_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t n_olig = table.oligomers();
  // Ties: position first, then the oligomer string.
  auto before = [&](std::size_t a, std::size_t b) {
    const double qa = std::abs(table.firm_values[a]);
    const double qb = std::abs(table.firm_values[b]);
    if (qa != qb) return qa > qb;
    const std::size_t ja = a / n_olig, jb = b / n_olig;
    if (ja != jb) return ja < jb;
    return table.decode(a % n_olig) < table.decode(b % n_olig);
  };
  top = std::min(top, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(top), order.end(), before);
  std::vector<RankedOligomer> out;
  out.reserve(top);
  for (std::size_t r = 0; r < top; ++r) {
    const std::size_t idx = order[r];
    out.push_back({table.decode(idx % n_olig), idx / n_olig, table.firm_values[idx]});
  }
  return out;
}

void write_poim_tsv(std::ostream& out, const PoimTable& table) {
  out << "k\tj\tz\tq_poim\tq_firm\n";
  for (std::size_t j = 0; j < table.positions(); ++j) {
    for (std::size_t code = 0; code < table.oligomers(); ++code) {
      const auto idx = table.index(code, j);
      out << table.k << '\t' << j << '\t' << table.decode(code) << '\t'
          << io::format_double(table.values[idx]) << '\t'
          << io::format_double(table.firm_values[idx]) << '\n';
    }
  }
}

void write_poim_summary_tsv(std::ostream& out, const PoimTable& table) {
  out << "j\tmax_abs_q\tmean_abs_q\n";
  const std::size_t n_olig = table.oligomers();
  for (std::size_t j = 0; j < table.positions(); ++j) {
    double mx = 0.0, sum = 0.0;
    for (std::size_t code = 0; code < n_olig; ++code) {
      const double a = std::abs(table.firm_values[table.index(code, j)]);
      mx = std::max(mx, a);
      sum += a;
    }
    out << j << '\t' << io::format_double(mx) << '\t'
        << io::format_double(sum / static_cast<double>(n_olig)) << '\n';
  }
}

}  // namespace firm
