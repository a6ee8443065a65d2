#include <doctest.h>

#include <cmath>

#include "mab/analysis.hpp"
#include "mab/oracle.hpp"
#include "mab/rng.hpp"

using namespace mab;

TEST_SUITE("oracle") {

TEST_CASE("ball values and closed-form residual") {
  CHECK(oracle::exact_ball({0.0, 0.0}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(oracle::exact_ball({0.6, 0.0}) == doctest::Approx(-0.8).epsilon(1e-14));
  CHECK_THROWS_AS(oracle::exact_ball({1.0, 0.0}), DomainError);

  Rng rng(201);
  for (int n : {2, 3}) {
    for (int t = 0; t < 1000; ++t) {
      Vec x = rng.direction(n);
      const double r = 0.95 * std::pow(rng.uniform(), 1.0 / n);
      for (auto& c : x) c *= r;
      const double resid = det(oracle::exact_ball_hessian(x)) *
                               pow_real(std::abs(oracle::exact_ball(x)), n + 2.0) -
                           1.0;
      CHECK(std::abs(resid) <= 1e-8);
    }
  }
}

TEST_CASE("fd oracles: quadratics, linears, ball at the origin") {
  Rng rng(203);
  Mat Q(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) Q(i, j) = Q(j, i) = rng.uniform(-1.0, 1.0);
  auto quad = [&](const Vec& x) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += x[i] * Q(i, j) * x[j];
    return s;
  };
  const Vec x0 = {0.3, -0.2, 0.5};
  const Mat h = oracle::fd_hessian(quad, x0, 1e-2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(h(i, j) - 2.0 * Q(i, j)) <= 1e-10);

  auto lin = [](const Vec& x) { return 3.0 * x[0] - 2.0 * x[1] + 0.25; };
  const Mat hl = oracle::fd_hessian(lin, {0.1, 0.7}, 1e-2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(hl(i, j)) <= 1e-11);

  const Mat hb =
      oracle::fd_hessian([](const Vec& x) { return oracle::exact_ball(x); }, {0.0, 0.0}, 1e-4);
  CHECK(std::abs(hb(0, 0) - 1.0) <= 1e-7);
  CHECK(std::abs(hb(1, 1) - 1.0) <= 1e-7);
  CHECK(std::abs(hb(0, 1)) <= 1e-7);

  auto ball3 = [](const Vec& x) { return oracle::exact_ball(x); };
  const Vec g = oracle::fd_gradient(ball3, {0.2, -0.1, 0.4}, 1e-6);
  const Vec ge = oracle::exact_ball_gradient({0.2, -0.1, 0.4});
  for (int i = 0; i < 3; ++i) CHECK(std::abs(g[i] - ge[i]) <= 1e-8);
}

TEST_CASE("cylinder closed values and FD residual") {
  // n = 2 at x' = 0, x_n = 1: -(sqrt 3) 2^{-1/3}
  CHECK(oracle::exact_cylinder({0.0, 1.0}) ==
        doctest::Approx(-std::sqrt(3.0) * std::pow(2.0, -1.0 / 3.0)).epsilon(1e-14));
  CHECK(std::abs(oracle::exact_cylinder({0.0, 1e-12})) <= 1e-3);
  CHECK_THROWS_AS(oracle::exact_cylinder({1.0, 0.5}), DomainError);

  Rng rng(205);
  for (int n : {2, 3}) {
    for (int t = 0; t < 200; ++t) {
      Vec x(n);
      double rp = 0.0;
      for (int i = 0; i + 1 < n; ++i) {
        x[i] = rng.uniform(-0.5, 0.5);
        rp += x[i] * x[i];
      }
      if (rp > 0.5) continue;
      x[n - 1] = rng.uniform(0.3, 1.5);
      const double resid = oracle::hyperbolic_residual_fd(
          [](const Vec& p) { return oracle::exact_cylinder(p); }, x, 1e-3);
      CHECK(std::abs(resid) <= 1e-6);
    }
  }
}

TEST_CASE("cone closed values and FD residual") {
  CHECK(oracle::exact_cone({0.0, 1.0}) ==
        doctest::Approx(-std::pow(27.0 / 4.0, 1.0 / 3.0)).epsilon(1e-14));
  // pure power along the axis: u(0, t) = u(0,1) t^{n/(n+1)}
  const double u1 = oracle::exact_cone({0.0, 1.0});
  for (double t : {0.25, 0.5, 2.0})
    CHECK(oracle::exact_cone({0.0, t}) ==
          doctest::Approx(u1 * std::pow(t, 2.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(oracle::exact_cone({1.0, 0.2}), DomainError);

  Rng rng(207);
  for (int n : {2, 3}) {
    const double slope = oracle::cone_slope(n);
    for (int t = 0; t < 200; ++t) {
      Vec x(n);
      x[n - 1] = rng.uniform(0.5, 1.5);
      const double reach = 0.5 * x[n - 1] / slope / std::sqrt(n - 1.0);
      for (int i = 0; i + 1 < n; ++i) x[i] = rng.uniform(-reach, reach);
      const double resid = oracle::hyperbolic_residual_fd(
          [](const Vec& p) { return oracle::exact_cone(p); }, x, 1e-3);
      CHECK(std::abs(resid) <= 1e-6);
    }
  }
}

TEST_CASE("exact solutions are convex at sampled interior points") {
  Rng rng(209);
  for (int t = 0; t < 100; ++t) {
    Vec x = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    auto ev = sym_eigenvalues(oracle::fd_hessian(
        [](const Vec& p) { return oracle::exact_ball(p); }, x, 1e-4));
    CHECK(ev.front() >= -1e-6);

    Vec xc = {rng.uniform(-0.4, 0.4), rng.uniform(0.4, 1.2)};
    ev = sym_eigenvalues(oracle::fd_hessian(
        [](const Vec& p) { return oracle::exact_cylinder(p); }, xc, 1e-4));
    CHECK(ev.front() >= -1e-6);

    Vec xk = {rng.uniform(-0.2, 0.2), rng.uniform(0.8, 1.4)};
    ev = sym_eigenvalues(oracle::fd_hessian(
        [](const Vec& p) { return oracle::exact_cone(p); }, xk, 1e-4));
    CHECK(ev.front() >= -1e-6);
  }
}

TEST_CASE("boundary rates of the exact solutions match the exponent calculus") {
  RatePairs pairs;
  for (int i = 0; i < 64; ++i) {
    const double d = 1e-4 * std::pow(1e3, i / 63.0);
    pairs.emplace_back(d, std::abs(oracle::exact_ball({1.0 - d, 0.0})));
  }
  CHECK(std::abs(fit_rate(pairs).mu_fitted - 0.5) <= 0.01);

  for (int n : {2, 3}) {
    pairs.clear();
    for (int i = 0; i < 64; ++i) {
      const double d = 1e-4 * std::pow(1e3, i / 63.0);
      Vec x(n, 0.0);
      x[n - 1] = d;
      pairs.emplace_back(d, std::abs(oracle::exact_cylinder(x)));
    }
    CHECK(std::abs(fit_rate(pairs).mu_fitted - 1.0 / (n + 1.0)) <= 0.01);

    pairs.clear();
    const double tilt = std::sqrt(1.0 + oracle::cone_slope(n) * oracle::cone_slope(n));
    for (int i = 0; i < 64; ++i) {
      const double t = 1e-4 * std::pow(1e3, i / 63.0);
      Vec x(n, 0.0);
      x[n - 1] = t;
      pairs.emplace_back(t / tilt, std::abs(oracle::exact_cone(x)));
    }
    CHECK(std::abs(fit_rate(pairs).mu_fitted - n / (n + 1.0)) <= 0.01);
  }
}

}  // TEST_SUITE
