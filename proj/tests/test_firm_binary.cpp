#include "firm/firm_binary.hpp"
#include "firm/firm_empirical.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace firm;

namespace {

Eigen::VectorXd random_w(int d, std::mt19937_64& rng) { return oracle::normal_vector(d, rng); }

}  // namespace

TEST_SUITE("firm_binary") {
  TEST_CASE("projection on the uniform cube recovers the weight") {
    std::mt19937_64 rng(1);
    for (int d = 1; d <= 6; ++d) {
      const Eigen::VectorXd w = random_w(d, rng);
      LinearScorer s{w, 0.7};
      const auto dist = PointDistribution::uniform_cube(d);
      for (int j = 0; j < d; ++j) {
        auto r = firm_binary_exact(s, Projection{static_cast<std::size_t>(j)}, dist);
        CHECK(r.q_signed == doctest::Approx(w(j)).epsilon(1e-12));
        CHECK(r.q_abs == std::abs(r.q_signed));
        REQUIRE(r.extras);
        CHECK(r.q_signed ==
              doctest::Approx((r.extras->q_a - r.extras->q_b) * std::sqrt(r.extras->p_a * r.extras->p_b)));
      }
    }
  }

  TEST_CASE("pair conjunction and XOR on the uniform cube") {
    std::mt19937_64 rng(2);
    const Eigen::VectorXd w = random_w(4, rng);
    LinearScorer s{w, -1.0};
    const auto dist = PointDistribution::uniform_cube(4);
    auto both = firm_binary_exact(s, SignedConjunction{{{0, true}, {2, true}}}, dist);
    CHECK(both.q_signed == doctest::Approx((w(0) + w(2)) / std::sqrt(3.0)).epsilon(1e-12));
    auto mixed = firm_binary_exact(s, SignedConjunction{{{1, false}, {3, true}}}, dist);
    CHECK(mixed.q_signed == doctest::Approx((-w(1) + w(3)) / std::sqrt(3.0)).epsilon(1e-12));
    auto x = firm_binary_exact(s, Xor{0, 3}, dist);
    CHECK(std::abs(x.q_signed) < 1e-12);
  }

  TEST_CASE("exact binary FIRM equals the standard deviation of the conditional mean") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 5 + trial;
      Eigen::MatrixXd X = oracle::random_pm1(n, 3, rng);
      Eigen::VectorXd p(n);
      for (int i = 0; i < n; ++i) p(i) = u(rng);
      PointDistribution dist{X, p / p.sum()};
      LinearScorer s{random_w(3, rng), 0.2};
      const Eigen::VectorXd scores = X * s.w + Eigen::VectorXd::Constant(n, s.b);
      FeatureFunction f = SignedConjunction{{{0, true}, {1, false}}};
      const Eigen::VectorXd fv = evaluate_all(f, X);
      if (fv.maxCoeff() == fv.minCoeff()) continue;
      auto r = firm_binary_exact(s, f, dist);
      CHECK(r.q_signed == doctest::Approx(oracle::binary_firm(scores, fv, p)).epsilon(1e-12));
    }
  }

  TEST_CASE("degenerate and multi-valued features are errors") {
    LinearScorer s{Eigen::Vector2d(1, 1), 0};
    Eigen::MatrixXd X(2, 2);
    X << 1, 1, 1, -1;
    CHECK_THROWS_AS(firm_binary_exact(s, Projection{0}, PointDistribution::empirical(X)),
                    std::invalid_argument);
    Eigen::MatrixXd Y(3, 2);
    Y << 0.5, 1, 1, -1, 2, 1;
    CHECK_THROWS_AS(firm_binary_exact(s, Projection{0}, PointDistribution::empirical(Y)),
                    std::invalid_argument);
  }

  TEST_CASE("matrix form on the full cube recovers w") {
    std::mt19937_64 rng(4);
    const Eigen::VectorXd w = random_w(3, rng);
    auto r = firm_binary_empirical_matrix(oracle::cube(3), w, 0.5);
    for (int j = 0; j < 3; ++j) CHECK(r[j].q_signed == doctest::Approx(w(j)).epsilon(1e-12));
  }

  TEST_CASE("balanced columns reproduce the standard scaling") {
    Eigen::MatrixXd X(6, 2);
    X << 1, 1, -1, 1, 1, 1, -1, -1, 1, 1, -1, 1;
    auto s = binary_matrix_scaling(X);
    CHECK(s.d0(0) == 0.0);
    CHECK(s.d1(0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(s.d0(1) != 0.0);
  }

  TEST_CASE("matrix form equals per-column enumeration") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> nd(2, 256), dd(1, 8);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = nd(rng), d = dd(rng);
      Eigen::MatrixXd X = oracle::random_pm1(n, d, rng);
      const Eigen::VectorXd w = random_w(d, rng);
      const double b = oracle::normal_vector(1, rng)(0);
      const Eigen::VectorXd scores = X * w + Eigen::VectorXd::Constant(n, b);
      auto r = firm_binary_empirical_matrix(X, w, b);
      for (int j = 0; j < d; ++j)
        CHECK(std::abs(r[j].q_signed - oracle::binary_firm(scores, X.col(j))) <= 1e-10);
    }
  }

  TEST_CASE("duplicated columns get equal importance") {
    std::mt19937_64 rng(6);
    Eigen::MatrixXd X = oracle::random_pm1(40, 3, rng);
    X.col(1) = X.col(0);
    Eigen::Vector3d w(1, 0, 0);
    auto r = firm_binary_empirical_matrix(X, w, 0.0);
    CHECK(r[0].q_signed == doctest::Approx(r[1].q_signed).epsilon(1e-12));
    CHECK(r[1].q_signed == doctest::Approx(oracle::binary_firm(X * w, X.col(1))).epsilon(1e-12));
  }

  TEST_CASE("single-valued and non-±1 columns are named") {
    Eigen::MatrixXd X(3, 2);
    X << 1, 1, -1, 1, 1, 1;
    CHECK_THROWS_WITH_AS(firm_binary_empirical_matrix(X, Eigen::Vector2d(1, 1), 0),
                         "column 2 is single-valued", std::invalid_argument);
    X(0, 0) = 0.5;
    CHECK_THROWS_AS(binary_matrix_scaling(X), std::invalid_argument);
  }

  TEST_CASE("closed-form conjunctions") {
    Eigen::VectorXd w(3);
    w << 1, 1, 1;
    CHECK(firm_uniform_conjunction(w, 0, {{0, true}, {1, true}}).q_signed ==
          doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
    CHECK(firm_uniform_conjunction(w, 0, {{2, true}}).q_signed == doctest::Approx(1.0));
    CHECK(firm_uniform_conjunction(w, 0, {{0, true}, {1, true}, {2, true}}).q_signed ==
          doctest::Approx(3.0 / std::sqrt(7.0)).epsilon(1e-15));
    CHECK_THROWS_AS(firm_uniform_conjunction(w, 0, {}), std::invalid_argument);
  }

  TEST_CASE("closed-form conjunctions match enumeration for every sign pattern") {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 7; ++d) {
      const Eigen::VectorXd w = random_w(d, rng);
      const double b = 0.4;
      const Eigen::MatrixXd X = oracle::cube(d);
      const Eigen::VectorXd scores = X * w + Eigen::VectorXd::Constant(X.rows(), b);
      for (int mask = 1; mask < (1 << d); ++mask) {
        std::vector<Literal> lits;
        for (int j = 0; j < d; ++j)
          if (mask >> j & 1) lits.push_back({static_cast<std::size_t>(j), (mask + j) % 3 != 0});
        auto r = firm_uniform_conjunction(w, b, lits);
        const Eigen::VectorXd fv = evaluate_all(SignedConjunction{lits}, X);
        CHECK(std::abs(r.q_signed - oracle::binary_firm(scores, fv)) <= 1e-12);
        REQUIRE(r.extras);
        double qa = 0, na = 0, qb = 0, nb = 0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
          if (fv(i) > 0.5) {
            qa += scores(i);
            na += 1;
          } else {
            qb += scores(i);
            nb += 1;
          }
        }
        CHECK(r.extras->q_a == doctest::Approx(qa / na).epsilon(1e-12));
        if (nb > 0) CHECK(r.extras->q_b == doctest::Approx(qb / nb).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("encoding and bias invariance") {
    std::mt19937_64 rng(8);
    Eigen::MatrixXd X = oracle::random_pm1(30, 2, rng);
    const Eigen::VectorXd s = X * Eigen::Vector2d(0.3, -2.0);
    const Eigen::VectorXd p = Eigen::VectorXd::Constant(30, 1.0 / 30);
    const double q = firm_binary_from_values("f", s, X.col(1), p).q_signed;
    const Eigen::VectorXd recoded = (3.0 * X.col(1)).array() + 7.0;
    CHECK(firm_binary_from_values("f", s, recoded, p).q_signed == doctest::Approx(q).epsilon(1e-12));
    const Eigen::VectorXd shifted = s.array() + 123.0;
    CHECK(firm_binary_from_values("f", shifted, X.col(1), p).q_signed ==
          doctest::Approx(q).epsilon(1e-12));
    auto m0 = firm_binary_empirical_matrix(X, Eigen::Vector2d(0.3, -2.0), 0.0);
    auto m1 = firm_binary_empirical_matrix(X, Eigen::Vector2d(0.3, -2.0), 50.0);
    for (int j = 0; j < 2; ++j) CHECK(m0[j].q_signed == m1[j].q_signed);
  }

  TEST_CASE("slope estimator equals binary FIRM on binary features") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::MatrixXd X = oracle::random_pm1(10 + trial * 5, 4, rng);
      const Eigen::VectorXd s = X * random_w(4, rng);
      for (int j = 0; j < 4; ++j)
        CHECK(std::abs(firm_slope(s, X.col(j)).q_signed - oracle::binary_firm(s, X.col(j))) <= 1e-12);
    }
  }

  TEST_CASE("POIM scaling factor") {
    CHECK(poim_firm_conversion(0.7, 0.5) == 0.7);
    CHECK(poim_firm_conversion(0.0, 0.3) == 0.0);
    CHECK(poim_firm_conversion(1.0, 0.25) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(poim_firm_conversion(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poim_firm_conversion(1.0, 1.0), std::invalid_argument);
  }
}
