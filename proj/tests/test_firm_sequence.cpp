#include "firm/firm_sequence.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace firm;

namespace {

struct RandomScorer {
  PositionalKmerScorer scorer;
  oracle::KmerWeights weights;
};

RandomScorer random_scorer(const std::string& alphabet, std::size_t L, std::size_t K,
                           std::size_t count, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pos(0, L - 1), len(1, K), letter(0, alphabet.size() - 1);
  std::normal_distribution<double> z;
  RandomScorer r;
  r.scorer.alphabet = alphabet;
  r.scorer.length = L;
  r.scorer.max_degree = K;
  r.scorer.weights.resize(L);
  r.scorer.b = z(rng);
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t i = pos(rng);
    const std::size_t k = std::min(len(rng), L - i);
    std::string y(k, alphabet[0]);
    for (auto& ch : y) ch = alphabet[letter(rng)];
    const double w = z(rng);
    r.scorer.weights[i][y] += w;
    r.weights[{i, y}] += w;
  }
  return r;
}

MarkovBackground random_background(const std::string& alphabet, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  MarkovBackground bg;
  bg.alphabet = alphabet;
  double total = 0;
  for (std::size_t i = 0; i < alphabet.size(); ++i) total += bg.letter_prob.emplace_back(u(rng));
  for (auto& p : bg.letter_prob) p /= total;
  return bg;
}

PositionalKmerScorer single_weight(std::size_t L, std::size_t i, const std::string& y, double w) {
  PositionalKmerScorer s;
  s.length = L;
  s.max_degree = y.size();
  s.weights.resize(L);
  s.weights[i][y] = w;
  return s;
}

}  // namespace

TEST_SUITE("firm_sequence") {
  TEST_CASE("expected score of a single trimer under uniform DNA") {
    auto s = single_weight(4, 0, "GAT", 1.0);
    const auto bg = MarkovBackground::uniform();
    CHECK(expected_score(s, bg) == doctest::Approx(1.0 / 64).epsilon(1e-15));
    oracle::KmerWeights w{{{0, "GAT"}, 1.0}};
    CHECK(std::abs(expected_score(s, bg) - oracle::enumerate_mean(w, 0, "ACGT", bg.letter_prob, 4)) < 1e-15);
  }

  TEST_CASE("expected score is linear in the weights") {
    auto s = single_weight(6, 0, "GA", 2.0);
    s.weights[3]["CCC"] = -1.0;
    s.b = 0.5;
    const auto bg = MarkovBackground::uniform();
    CHECK(expected_score(s, bg) == doctest::Approx(0.5 + 2.0 / 16 - 1.0 / 64).epsilon(1e-15));
    PositionalKmerScorer zero;
    zero.length = 5;
    zero.weights.resize(5);
    zero.b = 3.0;
    CHECK(expected_score(zero, bg) == 3.0);
  }

  TEST_CASE("conditional expectation examples") {
    auto s = single_weight(5, 0, "GAT", 1.0);
    s.b = 0.25;
    const auto bg = MarkovBackground::uniform();
    CHECK(conditional_expected_score(s, bg, "GAT", 0) == 1.25);
    CHECK(conditional_expected_score(s, bg, "GAT", 1) == 0.25);
    oracle::KmerWeights w{{{0, "GAT"}, 1.0}};
    CHECK(std::abs(conditional_expected_score(s, bg, "GAT", 1) -
                   oracle::enumerate_conditional(w, 0.25, "ACGT", bg.letter_prob, 5, "GAT", 1)) < 1e-15);
    CHECK(conditional_expected_score(s, bg, "GATCA", 0) == score(s, std::string_view("GATCA")));
    CHECK_THROWS_AS(conditional_expected_score(s, bg, "GAT", 3), std::out_of_range);
  }

  TEST_CASE("expectations match exhaustive enumeration") {
    std::mt19937_64 rng(1);
    for (const std::string alphabet : {"AB", "ACGT"}) {
      for (std::size_t L = 2; L <= 6; ++L) {
        for (int rep = 0; rep < 3; ++rep) {
          auto rs = random_scorer(alphabet, L, 3, 6, rng);
          const auto bg = random_background(alphabet, rng);
          rs.scorer.alphabet = alphabet;
          const double e = oracle::enumerate_mean(rs.weights, rs.scorer.b, alphabet, bg.letter_prob, static_cast<int>(L));
          CHECK(std::abs(expected_score(rs.scorer, bg) - e) <= 1e-12);
          for (std::size_t k = 1; k <= std::min<std::size_t>(L, 3); ++k) {
            for (const auto& z : oracle::all_strings(alphabet, static_cast<int>(k))) {
              for (std::size_t j = 0; j + k <= L; ++j) {
                const double c = oracle::enumerate_conditional(rs.weights, rs.scorer.b, alphabet,
                                                               bg.letter_prob, static_cast<int>(L), z, j);
                CHECK(std::abs(conditional_expected_score(rs.scorer, bg, z, j) - c) <= 1e-12);
              }
            }
          }
        }
      }
    }
  }

  TEST_CASE("k=1 table of a degree-1 scorer") {
    std::mt19937_64 rng(2);
    auto rs = random_scorer("ACGT", 5, 1, 12, rng);
    const auto bg = MarkovBackground::uniform();
    const auto t = poim(rs.scorer, bg, 1);
    for (std::size_t j = 0; j < 5; ++j) {
      double mean = 0;
      for (char c : std::string("ACGT")) mean += rs.scorer.weight(j, std::string(1, c)) / 4;
      for (char c : std::string("ACGT")) {
        const std::string z(1, c);
        CHECK(t.value(z, j) == doctest::Approx(rs.scorer.weight(j, z) - mean).epsilon(1e-12).scale(1.0));
      }
    }
  }

  TEST_CASE("zero scorer gives an all-zero table in a deterministic order") {
    PositionalKmerScorer s;
    s.length = 4;
    s.weights.resize(4);
    const auto t = poim(s, MarkovBackground::uniform(), 2);
    for (double v : t.values) CHECK(v == 0.0);
    auto a = ranked_oligomers(t, 5);
    CHECK(a.front().oligomer == "AA");
    CHECK(a.front().position == 0);
    CHECK(a[1].oligomer == "AC");
  }

  TEST_CASE("one nonzero cell ranks first") {
    auto s = single_weight(6, 2, "TTT", 1.0);
    const auto t = poim(s, MarkovBackground::uniform(), 3);
    auto top = ranked_oligomers(t, 3);
    CHECK(top[0].oligomer == "TTT");
    CHECK(top[0].position == 2);
  }

  TEST_CASE("table invariants") {
    std::mt19937_64 rng(3);
    for (const std::string alphabet : {"AB", "ACG", "ACGT"}) {
      auto rs = random_scorer(alphabet, 7, 3, 15, rng);
      const auto bg = random_background(alphabet, rng);
      for (std::size_t k = 1; k <= 4; ++k) {
        const auto t = poim(rs.scorer, bg, k);
        for (std::size_t j = 0; j < t.positions(); ++j) {
          double zero_mean = 0;
          for (std::size_t code = 0; code < t.oligomers(); ++code) {
            const auto z = t.decode(code);
            const double p = bg.probability(z);
            zero_mean += p * t.values[t.index(code, j)];
            CHECK(t.firm_values[t.index(code, j)] ==
                  doctest::Approx(t.values[t.index(code, j)] * std::sqrt((1 - p) / p)).epsilon(1e-12));
            CHECK(t.encode(z) == code);
          }
          CHECK(std::abs(zero_mean) <= 1e-9);
        }
      }
    }
  }

  TEST_CASE("parallel table equals the reference table") {
    std::mt19937_64 rng(4);
    for (std::size_t k = 1; k <= 5; ++k) {
      auto rs = random_scorer("ACGT", 12, 3, 40, rng);
      const auto bg = random_background("ACGT", rng);
      const auto fast = poim(rs.scorer, bg, k);
      const auto slow = reference::poim(rs.scorer, bg, k);
      REQUIRE(fast.values.size() == slow.values.size());
      for (std::size_t i = 0; i < fast.values.size(); ++i)
        CHECK(std::abs(fast.values[i] - slow.values[i]) <= 1e-12);
    }
  }

  TEST_CASE("uniform background keeps POIM and FIRM rankings identical per slice") {
    std::mt19937_64 rng(5);
    auto rs = random_scorer("ACGT", 8, 2, 20, rng);
    const auto t = poim(rs.scorer, MarkovBackground::uniform(), 3);
    for (std::size_t j = 0; j < t.positions(); ++j) {
      for (std::size_t a = 0; a < t.oligomers(); ++a) {
        for (std::size_t b = 0; b < t.oligomers(); ++b) {
          const bool by_poim = std::abs(t.values[t.index(a, j)]) < std::abs(t.values[t.index(b, j)]);
          const bool by_firm = std::abs(t.firm_values[t.index(a, j)]) < std::abs(t.firm_values[t.index(b, j)]);
          CHECK(by_poim == by_firm);
        }
      }
    }
  }

  TEST_CASE("oligomers longer than the scorer degree get importance") {
    auto s = single_weight(6, 1, "GA", 1.0);
    const auto t = poim(s, MarkovBackground::uniform(), 4);
    CHECK(t.value("AGAC", 0) > 0.0);
    CHECK(t.value("AGAC", 0) == doctest::Approx(1.0 - 1.0 / 16));
  }

  TEST_CASE("budget is enforced") {
    auto s = single_weight(20, 0, "A", 1.0);
    try {
      poim(s, MarkovBackground::uniform(), 8, 1000);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("budget") != std::string::npos);
    }
    CHECK_THROWS_AS(poim(s, MarkovBackground::uniform(), 0), std::invalid_argument);
    CHECK_THROWS_AS(poim(s, MarkovBackground::uniform(), 21), std::invalid_argument);
  }

  TEST_CASE("backgrounds") {
    auto data = make_sequences({"AACG", "TTAA"}, Eigen::Vector2d(1, -1));
    auto bg = MarkovBackground::fitted(data);
    CHECK(bg.letter_prob[0] == 0.5);
    CHECK(bg.probability("AT") == 0.5 * 0.25);
    MarkovBackground bad;
    bad.letter_prob = {0.5, 0.5, 0.5, -0.5};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("TSV writers") {
    auto s = single_weight(4, 0, "AC", 1.0);
    const auto t = poim(s, MarkovBackground::uniform(), 2);
    std::ostringstream full, summary;
    write_poim_tsv(full, t);
    write_poim_summary_tsv(summary, t);
    std::istringstream in(full.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "k\tj\tz\tq_poim\tq_firm");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3 * 16);
    CHECK(summary.str().rfind("j\tmax_abs_q\tmean_abs_q\n", 0) == 0);
  }
}
