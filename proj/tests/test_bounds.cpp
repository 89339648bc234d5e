// Numerical oracles for the exponential-sum, off-diagonal-operator, and
// compound-weight inequalities: closed-form pins, randomized suites, and
// log-domain/direct cross-checks.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "beamnf/bounds.hpp"
#include "doctest.h"

using namespace beamnf;

namespace {
constexpr double kE = std::numbers::e;
constexpr double kPi = std::numbers::pi;
}  // namespace

TEST_CASE("expsum_bound: 1-D geometric closed form") {
  auto c = expsum_bound(1, 1.0, 0.0, 200);
  // sum = 1 + 2 e^{-2} / (1 - e^{-2})
  const double exact = 1.0 + 2.0 * std::exp(-2.0) / (1.0 - std::exp(-2.0));
  CHECK(c.left == doctest::Approx(exact).epsilon(1e-10));
  CHECK(c.right == doctest::Approx(1.0 + kE).epsilon(1e-14));
  CHECK(c.pass);
  CHECK(c.margin > 0.0);
  CHECK(c.cross_check_rel >= 0.0);
  CHECK(c.cross_check_rel < 1e-10);
}

TEST_CASE("expsum_bound: 2-D sum factorizes for the l1 norm") {
  auto c = expsum_bound(2, 0.5, 0.0, 400);
  const double one_d = 1.0 + 2.0 * std::exp(-1.0) / (1.0 - std::exp(-1.0));
  CHECK(c.left == doctest::Approx(one_d * one_d).epsilon(1e-10));
  CHECK(c.right == doctest::Approx(4.0 * (1.0 + kE) * (1.0 + kE))
                       .epsilon(1e-12));
  CHECK(c.pass);
}

TEST_CASE("expsum_bound: large sigma limit is the k = 0 term") {
  auto c = expsum_bound(2, 50.0, 0.0, 50);
  CHECK(c.left == doctest::Approx(1.0).epsilon(1e-8));
  // The right side sigma^{-n}(1+e)^n sinks below the k = 0 term here: this
  // is a small-sigma inequality, and the negative margin must be recorded.
  CHECK_FALSE(c.pass);
  CHECK(c.margin < 0.0);
  CHECK(c.margin == doctest::Approx(c.right - c.left).epsilon(1e-14));
}

TEST_CASE("expsum_bound: |k|^v variant against its closed form") {
  auto c = expsum_bound(1, 0.5, 2.0, 400);
  // sum = 2 sum_k k^2 x^k = 2 x (1+x)/(1-x)^3 at x = e^{-1}
  const double x = std::exp(-1.0);
  const double exact = 2.0 * x * (1.0 + x) / std::pow(1.0 - x, 3);
  CHECK(c.left == doctest::Approx(exact).epsilon(1e-9));
  const double rhs = std::pow(2.0 / kE, 2.0) * std::pow(0.5, -3.0) * (1 + kE);
  CHECK(c.right == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(c.pass);
}

TEST_CASE("expsum_bound: sup-norm switch (sensitivity only)") {
  auto c = expsum_bound(2, 0.5, 0.0, 400, KNorm::linf);
  // shells (2n+1)^2 - (2n-1)^2 = 8n at distance n
  const double x = std::exp(-1.0);
  const double exact = 1.0 + 8.0 * x / std::pow(1.0 - x, 2);
  CHECK(c.left == doctest::Approx(exact).epsilon(1e-10));
  CHECK(c.pass);  // still below the l1-form bound at these parameters
}

TEST_CASE("expsum_bound: acceptance grid all pass with positive margin") {
  for (int n : {1, 2, 3})
    for (double sigma : {0.25, 0.5, 1.0}) {
      auto c = expsum_bound(n, sigma, 0.0, 800);
      CHECK(c.pass);
      CHECK(c.margin > 0.0);
      CHECK(c.cross_check_rel < 1e-10);
    }
}

TEST_CASE("hilbert_like_bound: identity and the exchange matrix") {
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  auto c0 = hilbert_like_bound(id, 5);
  CHECK(c0.left == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c0.pass);

  Eigen::MatrixXd ex(2, 2);
  ex << 0, 1, 1, 0;
  auto c1 = hilbert_like_bound(ex, 5);
  CHECK(c1.left == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(c1.right == doctest::Approx(kPi / std::sqrt(3.0)).epsilon(1e-7));
  CHECK(c1.pass);
}

TEST_CASE("hilbert_like_bound: power iteration recovers a known norm") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  d(2, 2) = 0.5;
  auto c = hilbert_like_bound(d, 8);
  // B = 0 for a diagonal matrix; right = (pi/sqrt 3) * ||A|| = (pi/sqrt3) * 3
  CHECK(c.left == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.right == doctest::Approx(3.0 * kPi / std::sqrt(3.0)).epsilon(1e-6));
}

TEST_CASE("hilbert_like_bound: randomized suite") {
  std::mt19937_64 g(5150);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd A(50, 50);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 50; ++j) A(i, j) = U(g);
    auto c = hilbert_like_bound(A, 4);
    CHECK(c.pass);
    CHECK(c.margin > 0.0);
  }
}

TEST_CASE("compound_bound: statement and proof variants, easy parameters") {
  auto both = compound_bound(1, 1.0, 0, 400);
  for (const auto& c : both) {
    CHECK(c.pass);
    CHECK(c.margin > 0.0);
    CHECK(c.cross_check_rel >= 0.0);
    CHECK(c.cross_check_rel < 1e-10);
  }
  // the |k|^4 sum dominates the |k|^2 sum
  CHECK(both[1].left > both[0].left);
  // shared right side
  const double rhs = std::pow(16.0 * 5.0 / kE, 10.0);
  CHECK(both[0].right == doctest::Approx(rhs).epsilon(1e-12));
  CHECK(both[1].right == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("compound_bound: halving sigma grows the margin") {
  const double s0 = 1.0 / 60.0;
  auto a = compound_bound(1, s0, 0, 6000);
  auto b = compound_bound(1, s0 / 2.0, 0, 12000);
  for (int i = 0; i < 2; ++i) {
    CHECK(a[i].pass);
    CHECK(b[i].pass);
    CHECK(b[i].margin > a[i].margin);
  }
}

TEST_CASE("compound_bound: the (1+v^2)^4 factor scales every summand") {
  auto v0 = compound_bound(1, 0.5, 0, 800);
  auto v3 = compound_bound(1, 0.5, 3, 800);
  // each summand gains (1+9)^4 = 10^4; the square root turns it into 10^2
  for (int i = 0; i < 2; ++i)
    CHECK(v3[i].left / v0[i].left == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("compound_bound: acceptance grid passes in both variants") {
  const double s0 = 1.0 / 60.0;
  for (int b : {1, 2})
    for (int v : {0, 1, 2})
      for (double s : {s0, s0 / 2.0}) {
        auto both = compound_bound(b, s, v, 20000);
        for (const auto& c : both) {
          CHECK(c.pass);
          CHECK(c.margin > 0.0);
          CHECK(c.cross_check_rel < 1e-10);
        }
      }
}

TEST_CASE("truncation too small for the tail majorant is rejected") {
  CHECK_THROWS_AS(compound_bound(2, 0.01, 0, 10), std::invalid_argument);
  CHECK_THROWS_AS(expsum_bound(1, 0.001, 5.0, 5), std::invalid_argument);
}
