#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mab/exponents.hpp"
#include "mab/rng.hpp"

using namespace mab;

namespace {

GrowthParams make(int n, int k, std::vector<double> a, double alpha, double beta,
                  double gamma = 0.0, double A = 1.0) {
  GrowthParams p;
  p.n = n;
  p.k = k;
  p.a = std::move(a);
  p.eta.assign(k, 1.0);
  p.alpha = alpha;
  p.beta = beta;
  p.gamma = gamma;
  p.A = A;
  return p;
}

GrowthParams random_admissible(Rng& rng) {
  GrowthParams p;
  p.n = 2 + static_cast<int>(rng.bits() % 4);  // 2..5
  p.k = static_cast<int>(rng.bits() % p.n);    // 0..n-1
  for (int i = 0; i < p.k; ++i) {
    p.a.push_back(rng.uniform(1.0, 6.0));
    p.eta.push_back(rng.uniform(0.1, 3.0));
  }
  p.beta = p.n + 1.0 + rng.uniform(0.0, 2.0);
  p.gamma = rng.uniform(-1.0, 1.0);
  p.A = rng.uniform(0.2, 5.0);
  double ab = 0.0;
  for (double ai : p.a) ab += 2.0 / ai;
  // numerator = ab + beta - n - gamma + 1 > 0 automatically (beta >= n+1,
  // gamma < 1); pick alpha so the denominator clears it.
  p.alpha = (ab + p.beta - p.n - p.gamma + 1.0) - p.n + p.gamma + rng.uniform(0.5, 4.0);
  return p;
}

}  // namespace

TEST_SUITE("exponents") {

TEST_CASE("abar closed values") {
  CHECK(exponents::abar(make(2, 0, {}, 4, 3)) == 0.0);
  CHECK(exponents::abar(make(2, 1, {2}, 4, 3)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(exponents::abar(make(3, 2, {1, 1}, 6, 4)) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("validate returns the complete violation list") {
  const auto ok = exponents::validate(make(2, 1, {2}, 4, 3));
  CHECK(ok.empty());

  auto beta_bad = make(2, 1, {2}, 4, 2);
  auto v1 = exponents::validate(beta_bad);
  REQUIRE(v1.size() == 1);
  CHECK(v1[0] == Violation::BetaTooSmall);

  auto alpha_bad = make(2, 1, {2}, -4, 3);
  auto v2 = exponents::validate(alpha_bad);
  REQUIRE(v2.size() == 1);
  CHECK(v2[0] == Violation::MuNotBelowOne);

  GrowthParams multi = make(2, 1, {0.5}, -4, 2, 0.0, -1.0);
  auto v3 = exponents::validate(multi);
  CHECK(v3.size() >= 3);  // a_i < 1, A <= 0, beta < n+1 at least
}

TEST_CASE("mu reproduces the exact example rates") {
  CHECK(std::abs(exponents::mu(make(2, 1, {2}, 4, 3)) - 0.5) <= 1e-12);
  CHECK(std::abs(exponents::mu(make(3, 1, {2}, 5, 4)) - 3.0 / 8.0) <= 1e-12);
  CHECK(std::abs(exponents::mu(make(2, 1, {1}, 4, 3)) - 2.0 / 3.0) <= 1e-12);
  CHECK_THROWS_AS(exponents::mu(make(2, 1, {2}, -4, 3)), ParamDomainError);
}

TEST_CASE("mu_flat closed values and k=0 reduction") {
  CHECK(std::abs(exponents::mu_flat(make(2, 0, {}, 4, 3)) - 1.0 / 3.0) <= 1e-12);
  CHECK(std::abs(exponents::mu_flat(make(3, 0, {}, 5, 4)) - 1.0 / 4.0) <= 1e-12);
  const auto p = make(2, 0, {}, 4, 3);
  CHECK(exponents::mu(p) == exponents::mu_flat(p));
}

TEST_CASE("b_coeffs closed values and the mu*a*b = 2 identity") {
  const auto b1 = exponents::b_coeffs(make(2, 1, {2}, 4, 3));
  REQUIRE(b1.size() == 1);
  CHECK(b1[0] == doctest::Approx(2.0).epsilon(1e-14));

  const auto b2 = exponents::b_coeffs(make(2, 1, {1}, 4, 3));
  CHECK(b2[0] == doctest::Approx(3.0).epsilon(1e-14));

  const auto b3 = exponents::b_coeffs(make(3, 2, {2, 2}, 5, 4));
  CHECK(b3[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(b3[1] == doctest::Approx(2.0).epsilon(1e-14));

  CHECK_THROWS_AS(exponents::b_coeffs(make(2, 0, {}, 4, 3)), ParamDomainError);
}

TEST_CASE("properties over random admissible parameters") {
  Rng rng(42);
  int with_k = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const GrowthParams p = random_admissible(rng);
    REQUIRE(exponents::admissible(p));
    const double mu = exponents::mu(p);
    CHECK(mu > 0.0);
    CHECK(mu < 1.0);
    if (p.k >= 1) {
      ++with_k;
      const auto b = exponents::b_coeffs(p);
      for (int i = 0; i < p.k; ++i) {
        CHECK(b[i] > 0.0);
        CHECK(std::abs(mu * p.a[i] * b[i] - 2.0) <= 1e-12 * 2.0);
      }
      // increasing a_i strictly decreases mu
      GrowthParams q = p;
      q.a[0] += 0.5;
      if (exponents::admissible(q)) CHECK(exponents::mu(q) < mu);
    }
  }
  CHECK(with_k > 100);
}

TEST_CASE("a1 -> infinity converges to the flat exponent") {
  auto p = make(2, 1, {1e6}, 4, 3);
  CHECK(std::abs(exponents::mu(p) - exponents::mu_flat(p)) <= 1e-5);
}

}  // TEST_SUITE
