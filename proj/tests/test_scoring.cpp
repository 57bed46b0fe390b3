#include "firm/scoring.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace firm;

namespace {

Eigen::VectorXd central_difference(const Scorer& s, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd a = x, b = x;
    a(j) += h;
    b(j) -= h;
    g(j) = (score(s, a) - score(s, b)) / (2.0 * h);
  }
  return g;
}

KernelExpansionScorer random_expansion(std::mt19937_64& rng, int m, int d, KernelSpec kernel) {
  KernelExpansionScorer s;
  s.points = Eigen::MatrixXd(m, d);
  for (int i = 0; i < m; ++i) s.points.row(i) = oracle::normal_vector(d, rng).transpose();
  s.alpha = oracle::normal_vector(m, rng);
  s.b = 0.3;
  s.kernel = kernel;
  return s;
}

TabularDataset random_regression(std::mt19937_64& rng, int n, int d) {
  Eigen::MatrixXd X = oracle::sample_normal(oracle::random_spd(d, 10.0, rng), n, rng);
  Eigen::VectorXd w = oracle::normal_vector(d, rng);
  Eigen::VectorXd y = X * w + 0.3 * oracle::normal_vector(n, rng);
  y.array() += 1.5;
  return make_tabular(X, y);
}

}  // namespace

TEST_SUITE("scoring") {
  TEST_CASE("linear score") {
    LinearScorer s{Eigen::Vector2d(1, 2), 0.0};
    CHECK(score(s, Eigen::Vector2d(1, 1)) == 3.0);
    CHECK_THROWS_AS(score(s, Eigen::Vector3d(1, 1, 1)), std::invalid_argument);
  }

  TEST_CASE("gaussian kernel at its own expansion point scores 1") {
    KernelExpansionScorer s;
    s.points = Eigen::MatrixXd(1, 2);
    s.points << 0.3, -1.2;
    s.alpha = Eigen::VectorXd::Ones(1);
    s.kernel = GaussianKernel{0.7};
    CHECK(score(s, Eigen::Vector2d(0.3, -1.2)) == 1.0);
  }

  TEST_CASE("positional k-mer indicator") {
    PositionalKmerScorer s;
    s.length = 4;
    s.max_degree = 3;
    s.weights.resize(4);
    s.weights[0]["GAT"] = 1.0;
    CHECK(score(s, std::string_view("GATT")) == 1.0);
    CHECK(score(s, std::string_view("AGAT")) == 0.0);
    CHECK(s.weight(0, "GAT") == 1.0);
    CHECK(s.weight(1, "GAT") == 0.0);
    CHECK(s.weight_count() == 1);
  }

  TEST_CASE("label oracle looks up rows and rejects misses") {
    auto data = make_tabular(oracle::cube(2), Eigen::Vector4d(1, -1, -1, 1));
    auto s = make_label_oracle(data);
    for (int i = 0; i < 4; ++i) CHECK(score(s, data.X.row(i).transpose()) == data.labels()(i));
    CHECK_THROWS_AS(score(s, Eigen::Vector2d(0.5, 1)), std::invalid_argument);
  }

  TEST_CASE("label oracle averages duplicate rows") {
    Eigen::MatrixXd X(3, 1);
    X << 1, 1, -1;
    auto s = make_label_oracle(make_tabular(X, Eigen::Vector3d(1, -1, 1)));
    CHECK(score(s, Eigen::VectorXd::Constant(1, 1.0)) == 0.0);
  }

  TEST_CASE("gradient at zero") {
    CHECK(gradient_at_zero(LinearScorer{Eigen::Vector2d(3, -1), 2.0}) == Eigen::Vector2d(3, -1));

    KernelExpansionScorer g;
    g.points = Eigen::MatrixXd(1, 2);
    g.points << 1, 0;
    g.alpha = Eigen::VectorXd::Ones(1);
    g.kernel = GaussianKernel{1.0};
    const Eigen::VectorXd grad = gradient_at_zero(g);
    CHECK(grad(0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK(grad(1) == 0.0);
    CHECK((central_difference(g, Eigen::Vector2d::Zero()) - grad).norm() < 1e-9);

    std::mt19937_64 rng(4);
    auto p = random_expansion(rng, 4, 3, PolynomialKernel{2, 0.0});
    CHECK(gradient_at_zero(p).isZero(0.0));
  }

  TEST_CASE("analytic gradients agree with central differences") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 40; ++trial) {
      const int d = 1 + trial % 5;
      KernelSpec k = trial % 2 ? KernelSpec{GaussianKernel{0.5 + trial % 3}}
                               : KernelSpec{PolynomialKernel{1 + trial % 4, 0.5 * (trial % 3)}};
      Scorer s = random_expansion(rng, 3, d, k);
      for (const Eigen::VectorXd& x : {Eigen::VectorXd(Eigen::VectorXd::Zero(d)),
                                       Eigen::VectorXd(0.5 * oracle::normal_vector(d, rng))}) {
        const Eigen::VectorXd a = gradient(s, x);
        const Eigen::VectorXd fd = central_difference(s, x);
        CHECK((a - fd).norm() <= 1e-6 * std::max(1.0, a.norm()));
      }
    }
  }

  TEST_CASE("scores are pure") {
    std::mt19937_64 rng(8);
    Scorer s = random_expansion(rng, 5, 3, GaussianKernel{1.3});
    Eigen::VectorXd x = oracle::normal_vector(3, rng);
    CHECK(score(s, x) == score(s, x));
  }

  TEST_CASE("least squares recovers an exact linear relation") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd X = oracle::sample_normal(Eigen::MatrixXd::Identity(3, 3), 30, rng);
    auto s = train_least_squares(make_tabular(X, 2.0 * X.col(0)));
    CHECK((s.w - Eigen::Vector3d(2, 0, 0)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(s.b) < 1e-10);
  }

  TEST_CASE("least squares residual is orthogonal to the columns") {
    std::mt19937_64 rng(2);
    auto data = random_regression(rng, 200, 4);
    auto s = train_least_squares(data);
    const Eigen::VectorXd r = data.X * s.w + Eigen::VectorXd::Constant(200, s.b) - data.labels();
    CHECK((data.X.transpose() * r).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::abs(r.sum()) < 1e-8);
  }

  TEST_CASE("least squares refuses rank-deficient problems") {
    std::mt19937_64 rng(3);
    auto data = make_tabular(oracle::sample_normal(Eigen::MatrixXd::Identity(4, 4), 3, rng),
                             Eigen::Vector3d(1, 2, 3));
    try {
      train_least_squares(data);
      FAIL("expected an exception");
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find("ridge") != std::string::npos);
    }
  }

  TEST_CASE("ridge limits") {
    std::mt19937_64 rng(4);
    auto data = random_regression(rng, 100, 3);
    auto ls = train_least_squares(data);
    auto small = train_ridge(data, 1e-12);
    CHECK((small.w - ls.w).norm() < 1e-8);
    CHECK(small.b == doctest::Approx(ls.b).epsilon(1e-8));
    auto big = train_ridge(data, 1e12);
    CHECK(big.w.norm() < 1e-9);
    CHECK(big.b == doctest::Approx(data.labels().mean()).epsilon(1e-8));
    CHECK_THROWS_AS(train_ridge(data, 0.0), std::invalid_argument);
  }

  TEST_CASE("ridge splits weight equally across duplicated columns") {
    std::mt19937_64 rng(5);
    Eigen::VectorXd a = oracle::normal_vector(50, rng);
    Eigen::VectorXd c = oracle::normal_vector(50, rng);
    Eigen::MatrixXd X(50, 3);
    X << a, a, c;
    auto s = train_ridge(make_tabular(X, 3.0 * a - c), 0.1);
    CHECK(s.w.allFinite());
    CHECK(s.w(0) == doctest::Approx(s.w(1)).epsilon(1e-12));
  }

  TEST_CASE("kernel ridge limits") {
    std::mt19937_64 rng(6);
    Eigen::MatrixXd X = oracle::sample_normal(Eigen::MatrixXd::Identity(2, 2), 15, rng);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y(i) = X(i, 0) * X(i, 1) > 0 ? 1.0 : -1.0;
    auto data = make_tabular(X, y);
    auto tight = train_kernel_ridge(data, GaussianKernel{0.5}, 1e-10);
    auto loose = train_kernel_ridge(data, GaussianKernel{0.5}, 1e10);
    for (int i = 0; i < 15; ++i) {
      CHECK(score(tight, X.row(i).transpose()) == doctest::Approx(y(i)).epsilon(1e-6));
      CHECK(score(loose, X.row(i).transpose()) == doctest::Approx(y.mean()).epsilon(1e-6));
    }
  }

  TEST_CASE("degree-2 kernel ridge separates the Boolean truth table") {
    Eigen::MatrixXd X = oracle::cube(3);
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      const bool x1 = X(i, 0) > 0, x2 = X(i, 1) > 0;
      y(i) = x1 || (!x1 && !x2) ? 1.0 : -1.0;
    }
    auto s = train_kernel_ridge(make_tabular(X, y), PolynomialKernel{2, 1.0}, 1e-6);
    for (int i = 0; i < 8; ++i) CHECK(score(s, X.row(i).transpose()) * y(i) > 0.0);
  }

  TEST_CASE("k-mer ridge puts the largest weight on the label-determining letter") {
    std::vector<std::string> seqs;
    Eigen::VectorXd y(64);
    int i = 0;
    for (const auto& s : oracle::all_strings("ACGT", 3)) {
      seqs.push_back(s);
      y(i++) = s[0] == 'A' ? 1.0 : -1.0;
    }
    auto s = train_positional_kmer(make_sequences(seqs, y), 1, 1e-3);
    double best = 0.0;
    std::string best_kmer;
    std::size_t best_pos = 99;
    for (std::size_t p = 0; p < s.weights.size(); ++p)
      for (const auto& [k, w] : s.weights[p])
        if (std::abs(w) > best) {
          best = std::abs(w);
          best_kmer = k;
          best_pos = p;
        }
    CHECK(best_kmer == "A");
    CHECK(best_pos == 0);
  }

  TEST_CASE("k-mer ridge matches the explicit primal solution") {
    // Build the explicit indicator feature matrix and solve the primal ridge
    // problem on centered labels; every weight must agree.
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> letter(0, 3);
    std::vector<std::string> seqs;
    Eigen::VectorXd y(25);
    for (int n = 0; n < 25; ++n) {
      std::string s(5, 'A');
      for (auto& c : s) c = "ACGT"[letter(rng)];
      seqs.push_back(s);
      y(n) = (s[1] == 'C') ? 1.0 : -1.0;
    }
    const std::size_t K = 2;
    const double lambda = 0.05;
    auto s = train_positional_kmer(make_sequences(seqs, y), K, lambda);

    std::vector<std::pair<std::size_t, std::string>> keys;
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t k = 1; k <= K && i + k <= 5; ++k)
        for (const auto& z : oracle::all_strings("ACGT", static_cast<int>(k))) keys.emplace_back(i, z);
    Eigen::MatrixXd Phi = Eigen::MatrixXd::Zero(25, static_cast<Eigen::Index>(keys.size()));
    for (int n = 0; n < 25; ++n)
      for (std::size_t f = 0; f < keys.size(); ++f)
        Phi(n, static_cast<Eigen::Index>(f)) = seqs[n].compare(keys[f].first, keys[f].second.size(), keys[f].second) == 0;
    const Eigen::MatrixXd A = Phi.transpose() * Phi +
                              25.0 * lambda * Eigen::MatrixXd::Identity(Phi.cols(), Phi.cols());
    const Eigen::VectorXd w = A.ldlt().solve(Phi.transpose() * (y.array() - y.mean()).matrix());
    for (std::size_t f = 0; f < keys.size(); ++f)
      CHECK(s.weight(keys[f].first, keys[f].second) ==
            doctest::Approx(w(static_cast<Eigen::Index>(f))).epsilon(1e-9).scale(1.0));
    CHECK(s.b == doctest::Approx(y.mean()));
  }

  TEST_CASE("k-mer ridge edge cases") {
    auto data = make_sequences({"ACGT", "TTTT", "GGCA"}, Eigen::Vector3d(1, 1, 1));
    CHECK_THROWS_WITH_AS(train_positional_kmer(data, 0, 0.1), "K must be >= 1", std::invalid_argument);
    auto s = train_positional_kmer(data, 2, 0.1);
    for (const auto& at : s.weights)
      for (const auto& [k, w] : at) CHECK(std::abs(w) < 1e-12);
    CHECK(s.b == 1.0);
  }

  TEST_CASE("standardization") {
    std::mt19937_64 rng(13);
    auto data = random_regression(rng, 80, 3);
    Scorer s = random_expansion(rng, 4, 3, GaussianKernel{2.0});
    Scorer once = standardize(s, data);
    CHECK(score_sd(once, data) == doctest::Approx(1.0).epsilon(1e-10));
    Scorer twice = standardize(once, data);
    const Eigen::VectorXd a = score_all(once, data), b = score_all(twice, data);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()));
    CHECK_THROWS_WITH_AS(standardize(LinearScorer{Eigen::Vector3d::Zero(), 4.0}, data),
                         "zero score variance", std::invalid_argument);
  }

  TEST_CASE("JSON round trip preserves every scorer exactly") {
    std::mt19937_64 rng(14);
    std::vector<Scorer> all;
    all.push_back(LinearScorer{oracle::normal_vector(3, rng), 1.0 / 3.0});
    all.push_back(random_expansion(rng, 3, 2, GaussianKernel{0.7}));
    all.push_back(random_expansion(rng, 3, 2, PolynomialKernel{3, 0.25}));
    all.push_back(make_label_oracle(make_tabular(oracle::cube(2), Eigen::Vector4d(0.1, -1, 1, 2))));
    all.push_back(train_positional_kmer(make_sequences({"ACGT", "TTGA", "GACA"}, Eigen::Vector3d(1, -1, 1)), 2, 0.1));

    auto text = make_sequences({"ACGA", "TTCA"}, Eigen::Vector2d(1, -1));
    for (const auto& s : all) {
      const auto doc = nlohmann::json::parse(to_json(s).dump());
      Scorer back = scorer_from_json(doc);
      CHECK(scorer_type(back) == scorer_type(s));
      CHECK(to_json(back) == to_json(s));
      if (std::holds_alternative<PositionalKmerScorer>(s)) {
        CHECK(score_all(back, text) == score_all(s, text));
      } else {
        auto X = oracle::cube(static_cast<int>(input_dimension(s)));
        CHECK(score_rows(back, X) == score_rows(s, X));
      }
    }
  }

  TEST_CASE("malformed scorer JSON is rejected") {
    CHECK_THROWS(scorer_from_json(nlohmann::json::parse(R"({"type":"nope","parameters":{}})")));
    CHECK_THROWS(scorer_from_json(nlohmann::json::parse(R"({"type":"linear"})")));
    CHECK_THROWS(scorer_from_json(nlohmann::json::parse(
        R"({"type":"kernel_expansion","parameters":{"kernel":{"type":"gaussian","gamma":1},"points":[[1,2],[3]],"alpha":[1,1],"b":0}})")));
  }
}
