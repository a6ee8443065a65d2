#include <doctest.h>

#include <cmath>
#include <memory>

#include "mab/barrier.hpp"
#include "mab/oracle.hpp"

using namespace mab;

namespace {

GrowthParams make_growth(int n, int k, std::vector<double> a, std::vector<double> eta,
                         double alpha, double beta, double gamma = 0.0) {
  GrowthParams g;
  g.n = n;
  g.k = k;
  g.a = std::move(a);
  g.eta = std::move(eta);
  g.alpha = alpha;
  g.beta = beta;
  g.gamma = gamma;
  g.A = 1.0;
  return g;
}

BoundaryFrame identity_frame(int n, int k) {
  return BoundaryFrame{Vec(n, 0.0), Mat::identity(n), k};
}

// growth always admissible with the hyperbolic exponents
GrowthParams hyperbolic_growth(int n, int k, std::vector<double> a) {
  return make_growth(n, k, std::move(a), std::vector<double>(k, 1.0), n + 2.0, n + 1.0);
}

/// Random point of the certified cup region in frame coordinates:
/// |y_i| <= frac (y_{k+1}/eta_i)^{1/a_i}, trailing |y_j| <= 0.5 d.
Vec certified_point(const BarrierParams& p, Rng& rng, double frac = 0.9) {
  const GrowthParams& g = p.growth;
  Vec y(g.n, 0.0);
  y[g.k] = p.epsilon * rng.uniform(0.25, 2.0);
  for (int i = 0; i < g.k; ++i)
    y[i] = frac * rng.uniform(-1.0, 1.0) * std::pow(y[g.k] / g.eta[i], 1.0 / g.a[i]);
  for (int i = g.k + 1; i < g.n; ++i) y[i] = rng.uniform(-0.5, 0.5) * p.d;
  return y;
}

double hess_inf_norm(const Mat& m) {
  double v = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) v = std::max(v, std::abs(m(i, j)));
  return v;
}

void check_jet_against_fd(const std::function<Jet2(const Vec&)>& eval, const Vec& y, double h) {
  const Jet2 jet = eval(y);
  auto value = [&](const Vec& p) { return eval(p).value; };
  const Vec fg = oracle::fd_gradient(value, y, h);
  // second differences need a larger base step to beat roundoff; Richardson
  // recovers the truncation order
  const Mat fh = oracle::fd_hessian_richardson(value, y, 500.0 * h);
  double gscale = 1.0;
  for (double c : jet.grad) gscale = std::max(gscale, std::abs(c));
  for (std::size_t i = 0; i < fg.size(); ++i)
    CHECK(std::abs(fg[i] - jet.grad[i]) <= 1e-6 * gscale);
  const double hscale = std::max(1.0, hess_inf_norm(jet.hess));
  for (std::size_t i = 0; i < fg.size(); ++i)
    for (std::size_t j = 0; j < fg.size(); ++j)
      CHECK(std::abs(fh(i, j) - jet.hess(i, j)) <= 1e-6 * hscale);
}

std::shared_ptr<const ConvexDomain> unit_disk() {
  return std::make_shared<const ConvexDomain>(
      2, std::vector<Constraint>{BallConstraint{{0.0, 0.0}, 1.0}},
      BoundingBox{{-1.05, -1.05}, {1.05, 1.05}});
}

}  // namespace

TEST_SUITE("barrier") {

TEST_CASE("delta_eps closed values") {
  CHECK(delta_eps(make_growth(2, 1, {2}, {1}, 4, 3), 0.01) ==
        doctest::Approx(0.01).epsilon(1e-14));
  CHECK(delta_eps(make_growth(2, 1, {1}, {1}, 4, 3), 0.04) ==
        doctest::Approx(0.0016).epsilon(1e-14));
  CHECK(delta_eps(make_growth(2, 0, {}, {}, 4, 3), 0.01) == 0.0);
}

TEST_CASE("eval_H closed values") {
  // disk reference: b = 2
  const auto g = make_growth(2, 1, {2}, {1}, 4, 3);
  const auto p = make_barrier_params(g, identity_frame(2, 1), 0.1, 1.0, 2.0);
  const Jet2 h = eval_H(p, {0.0, 0.1});
  CHECK(h.value == doctest::Approx(-1.0).epsilon(1e-14));
  // mixed entry vanishes on the axis
  CHECK(h.hess(0, 1) == 0.0);

  CHECK_THROWS_AS(eval_H(p, {10.0, 0.1}), DomainError);  // bracket <= 0
  CHECK_THROWS_AS(eval_H(p, {0.0, -0.1}), DomainError);
}

TEST_CASE("eval_G closed values") {
  const auto g = make_growth(2, 1, {2}, {1}, 4, 3);  // mu = 1/2
  const auto p = make_barrier_params(g, identity_frame(2, 1), 0.1, 1.0, 1.0);
  CHECK(p.Lambda == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
  const Jet2 gj = eval_G(p, {0.0, 0.1});
  CHECK(gj.value == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(eval_G(p, {0.0, -0.1}), DomainError);

  // k = n-1: only the normal-normal second derivative is nonzero
  CHECK(gj.hess(0, 0) == 0.0);
  CHECK(gj.hess(0, 1) == 0.0);
  CHECK(gj.hess(1, 1) > 0.0);
}

TEST_CASE("closed-form derivatives of H, G, W match finite differences") {
  Rng rng(301);
  for (int n = 2; n <= 4; ++n) {
    for (int k = 1; k <= n - 1; ++k) {
      std::vector<double> a;
      for (int i = 0; i < k; ++i) a.push_back(1.5 + 0.7 * i);
      const auto g = hyperbolic_growth(n, k, a);
      const auto p = make_barrier_params(g, identity_frame(n, k), 0.12, 2.0, 2.0);
      for (int t = 0; t < 60; ++t) {
        const Vec y = certified_point(p, rng, 0.8);
        const double h = 1e-5 * std::max(0.05, y[k]);
        check_jet_against_fd([&](const Vec& q) { return eval_H(p, q); }, y, h);
        check_jet_against_fd([&](const Vec& q) { return eval_G(p, q); }, y, h);
        BarrierFunction bf;
        bf.kind = BarrierKind::Anisotropic;
        bf.params = p;
        check_jet_against_fd([&](const Vec& q) { return bf.eval_frame(q); }, y, h);
      }
    }
  }
}

TEST_CASE("Schur identity: det E_{k+1} = det A_k (H_cc - v^T A_k^{-1} v)") {
  Rng rng(303);
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k <= n - 1; ++k) {
      std::vector<double> a;
      for (int i = 0; i < k; ++i) a.push_back(1.4 + 0.5 * i);
      const auto g = hyperbolic_growth(n, k, a);
      const auto p = make_barrier_params(g, identity_frame(n, k), 0.1, 1.0, 2.0);
      for (int t = 0; t < 100; ++t) {
        const Vec y = certified_point(p, rng);
        const Jet2 h = eval_H(p, y);
        Mat E(k + 1, k + 1);
        for (int i = 0; i <= k; ++i)
          for (int j = 0; j <= k; ++j) E(i, j) = h.hess(i, j);
        double detA = 1.0, schur = h.hess(k, k);
        for (int i = 0; i < k; ++i) {
          detA *= h.hess(i, i);
          schur -= h.hess(i, k) * h.hess(i, k) / h.hess(i, i);
        }
        const double lhs = det(E);
        const double rhs = detA * schur;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), std::abs(rhs)));
      }
    }
}

TEST_CASE("trailing G-block eigenvalues match the closed pair") {
  Rng rng(305);
  for (auto [n, k] : std::vector<std::pair<int, int>>{{3, 1}, {4, 1}, {5, 1}, {4, 2}}) {
    std::vector<double> a(k, 2.0);
    const auto g = hyperbolic_growth(n, k, a);
    const auto p = make_barrier_params(g, identity_frame(n, k), 0.1, 1.0, 2.0);
    for (int t = 0; t < 50; ++t) {
      const Vec y = certified_point(p, rng);
      const Jet2 gj = eval_G(p, y);
      const int m = n - k - 1;
      Mat block(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) block(i, j) = gj.hess(k + 1 + i, k + 1 + j);
      const Vec ev = sym_eigenvalues(block);
      const auto [small, big] = g_trailing_eigenvalues(p, y);
      for (int i = 0; i + 1 < m; ++i)
        CHECK(std::abs(ev[i] - small) <= 1e-10 * std::abs(big));
      CHECK(std::abs(ev[m - 1] - big) <= 1e-10 * std::abs(big));
    }
  }
}

TEST_CASE("axis identity |W| = M (k + Lambda) (t/eps)^mu and limit at the contact") {
  const auto g = make_growth(2, 1, {2}, {0.5}, 4, 3);
  const auto p = make_barrier_params(g, identity_frame(2, 1), 0.0625, 4.0, 2.0);
  BarrierFunction bf;
  bf.kind = BarrierKind::Anisotropic;
  bf.params = p;
  for (double t : {1e-6, 1e-3, 0.05, 0.4}) {
    const double w = bf.eval_frame({0.0, t}).value;
    const double expect = -p.M * (1.0 + p.Lambda) * std::pow(t / p.epsilon, 0.5);
    CHECK(std::abs(w - expect) <= 1e-13 * std::abs(expect));
    CHECK(bf.axis_magnitude(t) == doctest::Approx(-expect).epsilon(1e-13));
  }
  CHECK(std::abs(bf.eval_frame({0.0, 1e-20}).value) <= 1e-8);
}

TEST_CASE("xi values stay inside the certified bounds") {
  const auto dom = unit_disk();
  const auto g = make_growth(2, 1, {2}, {0.5}, 4, 3);
  const auto frame = build_frame(*dom, {0.0, -1.0}, 1);
  const auto p = make_barrier_params(g, frame, 0.0625, 1.0, dom->diameter());
  const double delta = delta_eps(p);
  Rng rng(307);
  for (int t = 0; t < 2000; ++t) {
    const Vec x = rng.point_in_box(dom->bbox().lo, dom->bbox().hi);
    if (!dom->contains(x, 1e-9)) continue;
    const auto xi = xi_values(p, frame.to_frame(x));
    for (int i = 0; i < g.k; ++i) {
      CHECK(xi[i] <= 1.0 + 1e-12);
      CHECK(xi[i] >= std::pow(1.0 - delta, 1.0 / p.b[i]) - 1e-12);
    }
  }
}

TEST_CASE("tau diagnostics approach their analytic limits along the ladder") {
  for (double gamma : {0.0, 0.5, -0.5}) {
    const auto g = make_growth(2, 1, {2}, {0.5}, 4, 3, gamma);
    if (!exponents::admissible(g)) continue;
    double prev_tau2 = std::numeric_limits<double>::infinity();
    BarrierDiagnostics dg;
    BarrierParams p;
    for (int j = 3; j <= 40; ++j) {
      p = make_barrier_params(g, identity_frame(2, 1), 0.25 * std::pow(2.0, -j), 1.0, 2.0);
      dg = compute_diagnostics(p);
      CHECK(dg.tau2 <= prev_tau2 + 1e-15);
      prev_tau2 = dg.tau2;
    }
    CHECK(std::abs(dg.tau1 - tau1_limit(p)) <= 0.05 * tau1_limit(p));
    CHECK(dg.tau2 <= 0.05);
    CHECK(std::abs(dg.tau3 - tau3_limit(p)) <= 0.05 * tau3_limit(p));
  }
}

TEST_CASE("analytic determinant bound holds at certified points") {
  Rng rng(309);
  // 2-D (k = n-1) and 3-D (trailing block present) configurations
  for (auto [n, k] : std::vector<std::pair<int, int>>{{2, 1}, {3, 1}, {4, 2}}) {
    std::vector<double> a(k, 2.0);
    const auto g = hyperbolic_growth(n, k, a);
    const auto p = make_barrier_params(g, identity_frame(n, k), 0.05, 2.0, 2.0);
    const auto dg = compute_diagnostics(p);
    REQUIRE(dg.tau1 > 0.0);
    BarrierFunction bf;
    bf.kind = BarrierKind::Anisotropic;
    bf.params = p;
    for (int t = 0; t < 500; ++t) {
      const Vec y = certified_point(p, rng);
      const double bound = schur_det_lower_bound(p, dg, y);
      const double actual = det(bf.eval_frame(y).hess);
      CHECK(actual >= bound * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("determinant bound is unavailable when eps is too large") {
  const auto g = make_growth(2, 1, {2}, {0.5}, 4, 3);
  const auto p = make_barrier_params(g, identity_frame(2, 1), 0.495, 1.0, 2.0);
  const auto dg = compute_diagnostics(p);
  CHECK(dg.tau1 <= 0.0);
  CHECK_THROWS_AS(schur_det_lower_bound(p, dg, {0.0, 0.1}), BoundUnavailableError);
}

TEST_CASE("find_eps_M certifies the disk contact point; scaled-down M fails") {
  const auto dom = unit_disk();
  Rng rng(311);
  const auto outcome = certify_k_convexity(*dom, {0.0, -1.0}, 1, {2.0}, {0.5}, 2048, rng);
  REQUIRE(outcome.ok());
  const auto model = RhsModel::pure_hyperbolic(2);
  const BarrierFunction bf = find_eps_M(*dom, *outcome.certificate, model, rng);
  CHECK(bf.min_FW > 1.0 + 1e-6);

  Rng rng2(313);
  const auto samples = make_certification_samples(
      *dom, bf.params.frame, 1, bf.params.growth.a, bf.params.growth.eta, 24, 24, rng2);
  BarrierFunction weak = bf;
  weak.params.M = bf.params.M / 1024.0;
  const auto sc = certify_subsolution(weak, model, *dom, samples);
  CHECK(!sc.pass);
  CHECK(sc.min_FW < 1.0);
}

TEST_CASE("flat barrier on the square: exponent 1/3, certified, convex") {
  const auto sq = std::make_shared<const ConvexDomain>(
      2, std::vector<Constraint>{BoxConstraint{{-1.0, -1.0}, {1.0, 1.0}}},
      BoundingBox{{-1.0, -1.0}, {1.0, 1.0}});
  const auto frame = build_frame(*sq, {0.0, -1.0}, 1);
  const auto model = RhsModel::pure_hyperbolic(2);
  Rng rng(317);
  const BarrierFunction bf = flat_barrier(*sq, model, frame, rng);
  CHECK(bf.mu0 == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(bf.min_FW > 1.0 + 1e-6);
  CHECK(bf.N * bf.N == doctest::Approx(2.0 * sq->diameter() * sq->diameter() + 1.0));

  // axis value and closed-form vs FD
  const double t = 0.25;
  const double w = bf.eval_frame({0.0, t}).value;
  CHECK(w == doctest::Approx(-bf.params.M * std::pow(t, bf.mu0) * bf.N * bf.N).epsilon(1e-13));
  Rng rng2(319);
  for (int s = 0; s < 50; ++s) {
    const Vec y = {rng2.uniform(-0.8, 0.8), rng2.uniform(0.1, 1.5)};
    check_jet_against_fd([&](const Vec& q) { return bf.eval_frame(q); }, y, 1e-5);
    const Vec ev = sym_eigenvalues(bf.eval_frame(y).hess);
    CHECK(ev.front() >= -1e-9 * std::max(1.0, hess_inf_norm(bf.eval_frame(y).hess)));
  }
}

TEST_CASE("inadmissible growth is rejected before any search") {
  const auto dom = unit_disk();
  Rng rng(321);
  const auto outcome = certify_k_convexity(*dom, {0.0, -1.0}, 1, {2.0}, {0.5}, 512, rng);
  REQUIRE(outcome.ok());
  GrowthParams bad;
  bad.n = 2;
  bad.k = 0;
  bad.alpha = -8.0;  // makes the merged growth violate mu < 1
  bad.beta = 3.0;
  bad.gamma = 0.0;
  bad.A = 1.0;
  const auto model = RhsModel::power_law(bad, nullptr);
  CHECK_THROWS_AS(find_eps_M(*dom, *outcome.certificate, model, rng), ParamDomainError);
}

}  // TEST_SUITE
