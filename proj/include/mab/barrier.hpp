#pragma once

// Explicit strict subsolutions of det D^2 u = F(x, u, Du) on a certified
// contact frame. The anisotropic barrier is W = M (H + G) with
//   H_i = -[ (x_{k+1}/eps)^{2/a_i} - x_i^2 ]^{1/b_i},
//   G   = -(x_{k+1}/eps)^mu sqrt(Lambda^2 - sum_trailing x_i^2),
// all with closed-form first and second derivatives, together with the
// scalar diagnostics (delta, c_j, c_{k+1}, ctilde_j, tau1..tau3) that feed
// the analytic determinant lower bound and the (eps, M) search. The flat
// barrier W = -M x_n^{mu0} (N^2 - sum_{i<n} x_i^2) covers contact points
// with no strictly convex direction.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mab/errors.hpp"
#include "mab/exponents.hpp"
#include "mab/geometry.hpp"
#include "mab/linalg.hpp"
#include "mab/rhs.hpp"
#include "mab/rng.hpp"

namespace mab {

struct Jet2 {
  double value = 0.0;
  Vec grad;
  Mat hess;
};

// ---------------------------------------------------------------------------
// BarrierParams + scalar diagnostics
// ---------------------------------------------------------------------------

struct BarrierParams {
  GrowthParams growth;
  BoundaryFrame frame;
  double epsilon = 0.0;
  double M = 1.0;
  double d = 0.0;        ///< domain diameter
  double Lambda = 0.0;   ///< sqrt(2 d^2 + 1)
  double mu = 0.0;
  std::vector<double> b;
};

inline double eps_upper_limit(const GrowthParams& g, double d) {
  double lim = std::min(1.0, d);
  for (double e : g.eta) lim = std::min(lim, e);
  return lim;
}

inline BarrierParams make_barrier_params(const GrowthParams& growth, const BoundaryFrame& frame,
                                         double epsilon, double M, double d) {
  exponents::require_admissible(growth, "make_barrier_params");
  if (growth.k < 1) throw ParamDomainError("make_barrier_params: k >= 1 required");
  if (!(epsilon > 0.0) || !(epsilon < eps_upper_limit(growth, d)))
    throw ParamDomainError("make_barrier_params: epsilon outside (0, min{1, d, min eta})");
  if (!(M >= 1.0)) throw ParamDomainError("make_barrier_params: M >= 1 required");
  BarrierParams p;
  p.growth = growth;
  p.frame = frame;
  p.epsilon = epsilon;
  p.M = M;
  p.d = d;
  p.Lambda = std::sqrt(2.0 * d * d + 1.0);
  p.mu = exponents::mu(growth);
  p.b = exponents::b_coeffs(growth);
  return p;
}

/// delta(eps) = max_i (eps/eta_i)^{2/a_i}; 0 when k = 0.
inline double delta_eps(const GrowthParams& g, double epsilon) {
  double m = 0.0;
  for (int i = 0; i < g.k; ++i)
    m = std::max(m, pow_real(epsilon / g.eta[i], 2.0 / g.a[i]));
  return m;
}

inline double delta_eps(const BarrierParams& p) { return delta_eps(p.growth, p.epsilon); }

struct BarrierDiagnostics {
  double delta = 0.0;
  std::vector<double> c;        ///< per-direction Hessian-diagonal lower constants
  double c_k1 = 0.0;            ///< normal-normal lower constant
  std::vector<double> c_tilde;  ///< mixed-entry upper constants
  double tau1 = 0.0;            ///< determinant-block constant; must be > 0
  double tau2 = 0.0;            ///< tangential/normal gradient ratio bound; -> 0
  double tau3 = 0.0;            ///< gradient-factor constant; must be > 0
  double a_hat = 0.0, a_check = 0.0;
  double xibar_lo = 0.0, xibar_hi = 0.0;  ///< range of mu * sum xi^{1-b}
};

/// x-independent bounds over the certified region, from the admissible xi
/// intervals xi_j in [(1-delta)^{1/b_j}, 1].
inline BarrierDiagnostics compute_diagnostics(const BarrierParams& p) {
  const GrowthParams& g = p.growth;
  if (g.k < 1) throw ParamDomainError("compute_diagnostics: k >= 1 required");
  BarrierDiagnostics dg;
  dg.delta = delta_eps(p);
  const double delta = dg.delta;
  const double mu = p.mu;

  dg.c.resize(g.k);
  dg.c_tilde.resize(g.k);
  double xibar_lo = 0.0, xibar_hi = 0.0;
  double ck1 = 0.0;
  for (int j = 0; j < g.k; ++j) {
    const double bj = p.b[j];
    const double aj = g.a[j];
    const double mn = std::min(std::pow(1.0 - delta, (1.0 - bj) / bj), 1.0);
    const double mx2 = std::max(std::pow(1.0 - delta, (1.0 - 2.0 * bj) / bj), 1.0);
    dg.c[j] = (2.0 / bj) * (mn - delta * (2.0 * std::abs(bj - 1.0) / bj) * mx2);
    dg.c_tilde[j] = (4.0 * std::abs(bj - 1.0) / (aj * bj * bj)) * mx2;

    const double xi_lo = std::pow(1.0 - delta, 1.0 / bj);
    double term_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s <= 64; ++s) {
      const double xi = xi_lo + (1.0 - xi_lo) * static_cast<double>(s) / 64.0;
      const double term = (1.0 / mu - bj) * std::pow(xi, 1.0 - bj) +
                          (bj - 1.0) * std::pow(xi, 1.0 - 2.0 * bj);
      term_min = std::min(term_min, term);
    }
    ck1 += term_min;
    xibar_lo += std::min(std::pow(1.0 - delta, (1.0 - bj) / bj), 1.0);
    xibar_hi += std::max(std::pow(1.0 - delta, (1.0 - bj) / bj), 1.0);
  }
  dg.c_k1 = mu * mu * ck1;
  dg.xibar_lo = mu * xibar_lo;
  dg.xibar_hi = mu * xibar_hi;

  bool c_pos = true;
  for (double cj : dg.c) c_pos = c_pos && cj > 0.0;
  if (c_pos) {
    double prod = 1.0, corr = 0.0;
    for (int j = 0; j < g.k; ++j) {
      prod *= dg.c[j];
      corr += dg.c_tilde[j] * dg.c_tilde[j] / dg.c[j];
    }
    dg.tau1 = prod * (dg.c_k1 - delta * corr);
  } else {
    dg.tau1 = -std::numeric_limits<double>::infinity();
  }

  dg.a_hat = *std::max_element(g.a.begin(), g.a.end());
  dg.a_check = 1.0 / dg.a_hat;
  dg.tau2 = dg.a_hat * std::pow(p.epsilon, dg.a_check) * std::sqrt(delta) *
            std::pow(p.d, 1.0 - dg.a_check);

  // worst case of the gradient-factor product over the xibar range
  double t3 = std::numeric_limits<double>::infinity();
  for (int s = 0; s <= 64; ++s) {
    const double xb = dg.xibar_lo + (dg.xibar_hi - dg.xibar_lo) * static_cast<double>(s) / 64.0;
    const double f1 = std::min(1.0, std::pow(2.0 + 2.0 * std::sqrt(2.0) * p.Lambda / xb, -g.gamma));
    const double f2 = std::min(1.0, std::pow(1.0 + dg.tau2, -g.gamma));
    t3 = std::min(t3, f1 * f2 * std::pow(xb, -g.gamma));
  }
  dg.tau3 = t3;
  return dg;
}

/// Analytic limits of tau1 and tau3 as eps -> 0.
inline double tau1_limit(const BarrierParams& p) {
  double prod = 1.0;
  for (double aj : p.growth.a) prod *= aj;
  return p.growth.k * prod * std::pow(p.mu, p.growth.k + 1.0) * (1.0 - p.mu);
}

inline double tau3_limit(const BarrierParams& p) {
  const double mk = p.mu * p.growth.k;
  return std::min(1.0, std::pow(2.0 + 2.0 * std::sqrt(2.0) * p.Lambda / mk, -p.growth.gamma)) *
         std::pow(mk, -p.growth.gamma);
}

// ---------------------------------------------------------------------------
// Closed-form evaluation (frame coordinates, normal on axis index k)
// ---------------------------------------------------------------------------

/// H = sum_i H_i, with gradient and Hessian. Requires y_{k+1} > 0 and every
/// bracket (y_{k+1}/eps)^{2/a_i} - y_i^2 > 0.
inline Jet2 eval_H(const BarrierParams& p, const Vec& y) {
  const GrowthParams& g = p.growth;
  const int n = g.n, k = g.k;
  const double eps = p.epsilon;
  const double s = y[k] / eps;
  if (!(s > 0.0)) throw DomainError("eval_H: y_{k+1} <= 0");
  Jet2 out;
  out.grad.assign(n, 0.0);
  out.hess = Mat(n, n);
  for (int i = 0; i < k; ++i) {
    const double ai = g.a[i], bi = p.b[i];
    const double s2a = pow_real(s, 2.0 / ai);
    const double bracket = s2a - y[i] * y[i];
    if (!(bracket > 0.0)) throw DomainError("eval_H: bracket <= 0 (outside barrier domain)");
    const double A1 = std::pow(bracket, 1.0 / bi - 1.0);   // |H_i|^{1-b_i}
    const double A2 = std::pow(bracket, 1.0 / bi - 2.0);   // |H_i|^{1-2 b_i}
    const double Hi = -A1 * bracket;                       // -bracket^{1/b_i}
    out.value += Hi;

    const double s2a_m1 = s2a / s;        // s^{2/a_i - 1}
    const double s2a_m2 = s2a / (s * s);  // s^{2/a_i - 2}

    out.grad[i] += (2.0 / bi) * A1 * y[i];
    out.grad[k] += -(2.0 / (ai * bi * eps)) * A1 * s2a_m1;

    out.hess(i, i) += (2.0 / bi) * A1 + (4.0 * (bi - 1.0) / (bi * bi)) * A2 * y[i] * y[i];
    const double mixed = -(4.0 * (bi - 1.0) / (ai * bi * bi)) * A2 * s2a_m1 * y[i] / eps;
    out.hess(i, k) = mixed;
    out.hess(k, i) = mixed;
    out.hess(k, k) += (2.0 * (ai - 2.0) / (ai * ai * bi)) * A1 * s2a_m2 / (eps * eps) +
                      (4.0 * (bi - 1.0) / (ai * ai * bi * bi)) * A2 * s2a * s2a_m2 / (eps * eps);
  }
  return out;
}

/// G with gradient and Hessian. Requires y_{k+1} > 0.
inline Jet2 eval_G(const BarrierParams& p, const Vec& y) {
  const GrowthParams& g = p.growth;
  const int n = g.n, k = g.k;
  const double eps = p.epsilon, mu = p.mu;
  const double s = y[k] / eps;
  if (!(s > 0.0)) throw DomainError("eval_G: y_{k+1} <= 0");
  double T = 0.0;
  for (int i = k + 1; i < n; ++i) T += y[i] * y[i];
  const double S2 = p.Lambda * p.Lambda - T;
  if (!(S2 > 0.0)) throw DomainError("eval_G: trailing radius exceeds Lambda");
  const double S = std::sqrt(S2);
  const double smu = std::pow(s, mu);
  const double smu1 = smu / s;        // s^{mu-1}
  const double smu2 = smu / (s * s);  // s^{mu-2}

  Jet2 out;
  out.grad.assign(n, 0.0);
  out.hess = Mat(n, n);
  out.value = -smu * S;
  out.grad[k] = -(mu / eps) * smu1 * S;
  for (int j = k + 1; j < n; ++j) out.grad[j] = smu * y[j] / S;

  out.hess(k, k) = mu * (1.0 - mu) / (eps * eps) * smu2 * S;
  for (int j = k + 1; j < n; ++j) {
    const double mixed = (mu / eps) * smu1 * y[j] / S;
    out.hess(k, j) = mixed;
    out.hess(j, k) = mixed;
    for (int i = k + 1; i < n; ++i)
      out.hess(i, j) = smu * ((i == j ? 1.0 : 0.0) / S + y[i] * y[j] / (S2 * S));
  }
  return out;
}

/// Pointwise xi_i(y) = |H_i(y)| (y_{k+1}/eps)^{-mu}; inside a certified
/// region every value lies in [(1-delta)^{1/b_i}, 1].
inline std::vector<double> xi_values(const BarrierParams& p, const Vec& y) {
  const GrowthParams& g = p.growth;
  const double s = y[g.k] / p.epsilon;
  if (!(s > 0.0)) throw DomainError("xi_values: y_{k+1} <= 0");
  const double smu = std::pow(s, p.mu);
  std::vector<double> xi(g.k);
  for (int i = 0; i < g.k; ++i) {
    const double bracket = pow_real(s, 2.0 / g.a[i]) - y[i] * y[i];
    if (!(bracket > 0.0)) throw DomainError("xi_values: bracket <= 0");
    xi[i] = std::pow(bracket, 1.0 / p.b[i]) / smu;
  }
  return xi;
}

/// The two distinct eigenvalues of the trailing block of D^2 G:
/// s^mu / S with multiplicity n-k-2 and s^mu Lambda^2 / S^3.
inline std::pair<double, double> g_trailing_eigenvalues(const BarrierParams& p, const Vec& y) {
  const int n = p.growth.n, k = p.growth.k;
  const double s = y[k] / p.epsilon;
  double T = 0.0;
  for (int i = k + 1; i < n; ++i) T += y[i] * y[i];
  const double S = std::sqrt(p.Lambda * p.Lambda - T);
  const double smu = std::pow(s, p.mu);
  return {smu / S, smu * p.Lambda * p.Lambda / (S * S * S)};
}

// ---------------------------------------------------------------------------
// BarrierFunction
// ---------------------------------------------------------------------------

enum class BarrierKind { Anisotropic, Flat };

struct BarrierFunction {
  BarrierKind kind = BarrierKind::Anisotropic;
  BarrierParams params;       // anisotropic path (frame normal on axis k)
  // flat path
  double mu0 = 0.0;
  double N = 0.0;             // N^2 = 2 d^2 + 1
  // certificate data
  double min_FW = 0.0;
  Vec worst_point;            // world coordinates of the minimizing sample

  const BoundaryFrame& frame() const { return params.frame; }

  Jet2 eval_frame(const Vec& y) const {
    if (kind == BarrierKind::Anisotropic) {
      Jet2 h = eval_H(params, y);
      const Jet2 g = eval_G(params, y);
      h.value = params.M * (h.value + g.value);
      for (std::size_t i = 0; i < h.grad.size(); ++i)
        h.grad[i] = params.M * (h.grad[i] + g.grad[i]);
      for (std::size_t i = 0; i < h.grad.size(); ++i)
        for (std::size_t j = 0; j < h.grad.size(); ++j)
          h.hess(i, j) = params.M * (h.hess(i, j) + g.hess(i, j));
      return h;
    }
    return eval_flat(y);
  }

  Jet2 eval_world(const Vec& x) const { return eval_frame(params.frame.to_frame(x)); }

  /// Value only (cheap path for solver initialization and comparisons).
  double value_world(const Vec& x) const {
    const Vec y = params.frame.to_frame(x);
    if (kind == BarrierKind::Flat) {
      const int n = params.growth.n;
      const double xn = y[n - 1];
      if (!(xn > 0.0)) throw DomainError("barrier value: x_n <= 0");
      double rho = N * N;
      for (int i = 0; i + 1 < n; ++i) rho -= y[i] * y[i];
      return -params.M * std::pow(xn, mu0) * rho;
    }
    const GrowthParams& g = params.growth;
    const double s = y[g.k] / params.epsilon;
    if (!(s > 0.0)) throw DomainError("barrier value: y_{k+1} <= 0");
    double v = 0.0;
    for (int i = 0; i < g.k; ++i) {
      const double bracket = pow_real(s, 2.0 / g.a[i]) - y[i] * y[i];
      if (!(bracket > 0.0)) throw DomainError("barrier value: bracket <= 0");
      v -= std::pow(bracket, 1.0 / params.b[i]);
    }
    double T = 0.0;
    for (int i = g.k + 1; i < g.n; ++i) T += y[i] * y[i];
    v -= std::pow(s, params.mu) * std::sqrt(params.Lambda * params.Lambda - T);
    return params.M * v;
  }

  /// |W| on the inward axis: M (k + Lambda) (t/eps)^mu for the anisotropic
  /// kind, M N^2 t^{mu0} for the flat kind.
  double axis_magnitude(double t) const {
    if (kind == BarrierKind::Flat) return params.M * N * N * std::pow(t, mu0);
    return params.M * (params.growth.k + params.Lambda) * std::pow(t / params.epsilon, params.mu);
  }

 private:
  Jet2 eval_flat(const Vec& y) const {
    const int n = params.growth.n;
    const double xn = y[n - 1];
    if (!(xn > 0.0)) throw DomainError("eval_flat: x_n <= 0");
    double rho = N * N;
    for (int i = 0; i + 1 < n; ++i) rho -= y[i] * y[i];
    const double phi = std::pow(xn, mu0);
    const double phi1 = mu0 * phi / xn;
    const double M = params.M;
    Jet2 out;
    out.grad.assign(n, 0.0);
    out.hess = Mat(n, n);
    out.value = -M * phi * rho;
    for (int i = 0; i + 1 < n; ++i) {
      out.grad[i] = 2.0 * M * phi * y[i];
      out.hess(i, i) = 2.0 * M * phi;
      const double mixed = 2.0 * M * phi1 * y[i];
      out.hess(i, n - 1) = mixed;
      out.hess(n - 1, i) = mixed;
    }
    out.grad[n - 1] = -M * phi1 * rho;
    out.hess(n - 1, n - 1) = M * mu0 * (1.0 - mu0) * phi / (xn * xn) * rho;
    return out;
  }
};

/// Analytic determinant lower bound at frame point y:
///   M^n Lambda^{k+1-n} eps^{-2} tau1 (y_{k+1}/eps)^{n mu - abar - 2}.
/// Throws BoundUnavailableError when tau1 <= 0 (eps too large).
inline double schur_det_lower_bound(const BarrierParams& p, const BarrierDiagnostics& dg,
                                    const Vec& y) {
  if (!(dg.tau1 > 0.0))
    throw BoundUnavailableError("schur_det_lower_bound: tau1 <= 0, shrink epsilon");
  const GrowthParams& g = p.growth;
  const double s = y[g.k] / p.epsilon;
  if (!(s > 0.0)) throw DomainError("schur_det_lower_bound: y_{k+1} <= 0");
  const double ab = exponents::abar(g);
  return pow_real(p.M, static_cast<double>(g.n)) *
         pow_real(p.Lambda, static_cast<double>(g.k + 1 - g.n)) / (p.epsilon * p.epsilon) *
         dg.tau1 * std::pow(s, g.n * p.mu - ab - 2.0);
}

// ---------------------------------------------------------------------------
// Certification
// ---------------------------------------------------------------------------

struct SubsolutionCertificate {
  bool pass = false;
  double min_FW = std::numeric_limits<double>::infinity();
  Vec worst_point;       // world coordinates of the minimizing sample
  double margin = 1e-6;
  std::size_t samples = 0;
};

/// Evaluate F[W] = det D^2 W / F(x, W, grad W) at every sample (world
/// coordinates, strictly inside the domain); pass iff the minimum exceeds
/// 1 + margin and W is convex at every sample.
inline SubsolutionCertificate certify_subsolution(const BarrierFunction& barrier,
                                                  const RhsModel& model,
                                                  const ConvexDomain& domain,
                                                  const std::vector<Vec>& samples,
                                                  double margin = 1e-6) {
  SubsolutionCertificate cert;
  cert.margin = margin;
  cert.samples = samples.size();
  if (samples.empty()) throw ParamDomainError("certify_subsolution: empty sample set");
  bool convex_ok = true;
  for (const auto& x : samples) {
    if (!domain.contains(x)) throw DomainError("certify_subsolution: sample outside domain");
    const Jet2 jet = barrier.eval_world(x);
    double d_x = 1.0;
    if (model.uses_distance()) d_x = domain.distance_to_boundary(x);
    const double F = model.eval_with_distance(d_x, jet.value, dot(jet.grad, jet.grad));
    const double FW = det(jet.hess) / F;
    if (FW < cert.min_FW) {
      cert.min_FW = FW;
      cert.worst_point = x;
    }
    double hmax = 0.0;
    for (std::size_t i = 0; i < jet.hess.rows(); ++i)
      for (std::size_t j = 0; j < jet.hess.cols(); ++j)
        hmax = std::max(hmax, std::abs(jet.hess(i, j)));
    const Vec ev = sym_eigenvalues(jet.hess);
    if (ev.front() < -1e-9 * std::max(1.0, hmax)) convex_ok = false;
  }
  cert.pass = convex_ok && cert.min_FW > 1.0 + margin;
  return cert;
}

/// Dyadic sample ladder concentrating at the contact point: levels
/// t_m = t_top 2^{-m} in the frame-normal coordinate, tangential jitter at
/// each level, all filtered to strict domain membership.
inline std::vector<Vec> make_certification_samples(const ConvexDomain& domain,
                                                   const BoundaryFrame& frame, int k,
                                                   const std::vector<double>& a,
                                                   const std::vector<double>& eta,
                                                   std::size_t per_level, int levels, Rng& rng) {
  std::vector<Vec> out;
  const int n = domain.dim();
  const double d = domain.diameter();
  double t_top = 0.0;
  for (double t = d; t > 1e-12 * d; t *= 0.5) {
    if (domain.contains(frame.inward_point(t), 1e-12 * d)) {
      t_top = t;
      break;
    }
  }
  if (t_top == 0.0) throw DomainError("make_certification_samples: inward axis leaves domain");
  for (int m = 0; m < levels; ++m) {
    const double t = t_top * std::pow(2.0, -m);
    Vec axis(n, 0.0);
    axis[frame.normal_axis] = t;
    const Vec axis_world = frame.to_world(axis);
    if (domain.contains(axis_world, 1e-14 * d)) out.push_back(axis_world);
    for (std::size_t s = 0; s < per_level; ++s) {
      Vec y(n, 0.0);
      y[frame.normal_axis] = t;
      for (int i = 0; i < k; ++i) {
        const double reach = std::pow(t / eta[i], 1.0 / a[i]);
        y[i] = rng.uniform(-0.98, 0.98) * reach;
      }
      for (int i = k + 1; i < n; ++i) y[i] = rng.uniform(-d, d);
      const Vec w = frame.to_world(y);
      if (domain.contains(w, 1e-14 * d)) out.push_back(w);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// (eps, M) search
// ---------------------------------------------------------------------------

namespace detail {

inline GrowthParams merge_certificate(const GrowthParams& model_params,
                                      const ConvexityCertificate& cert) {
  GrowthParams g = model_params;
  g.k = cert.k;
  g.a = cert.a;
  g.eta = cert.eta;
  return g;
}

}  // namespace detail

/// Deterministic search: walk eps down a geometric ladder until the
/// diagnostics are positive and |grad H| >= 1 on the sample set, then double
/// M from 1 until the subsolution certificate passes.
inline BarrierFunction find_eps_M(const ConvexDomain& domain, const ConvexityCertificate& cert,
                                  const RhsModel& model, Rng& rng, double margin = 1e-6,
                                  std::size_t per_level = 48, int levels = 30) {
  const GrowthParams growth = detail::merge_certificate(model.params(), cert);
  exponents::require_admissible(growth, "find_eps_M");
  const double d = domain.diameter();
  const double eps_max = 0.5 * eps_upper_limit(growth, d);

  const auto samples = make_certification_samples(domain, cert.frame, cert.k, cert.a, cert.eta,
                                                  per_level, levels, rng);
  std::string last_note = "ladder not entered";
  for (int j = 0; j <= 60; ++j) {
    const double eps = eps_max * std::pow(2.0, -j);
    BarrierParams params = make_barrier_params(growth, cert.frame, eps, 1.0, d);
    const BarrierDiagnostics dg = compute_diagnostics(params);
    if (!(dg.tau1 > 0.0) || !(dg.tau3 > 0.0)) {
      last_note = "tau1/tau3 not positive at eps=" + std::to_string(eps);
      continue;
    }
    bool grad_ok = true;
    for (const auto& x : samples) {
      const Jet2 h = eval_H(params, params.frame.to_frame(x));
      if (norm(h.grad) < 1.0) {
        grad_ok = false;
        break;
      }
    }
    if (!grad_ok) {
      last_note = "|grad H| < 1 at eps=" + std::to_string(eps);
      continue;
    }
    for (double M = 1.0; M <= std::pow(2.0, 40); M *= 2.0) {
      params.M = M;
      BarrierFunction bf;
      bf.kind = BarrierKind::Anisotropic;
      bf.params = params;
      const auto sc = certify_subsolution(bf, model, domain, samples, margin);
      if (sc.pass) {
        bf.min_FW = sc.min_FW;
        bf.worst_point = sc.worst_point;
        return bf;
      }
      last_note = "min F[W]=" + std::to_string(sc.min_FW) + " at eps=" + std::to_string(eps) +
                  " M=" + std::to_string(M);
    }
  }
  throw SearchFailure("find_eps_M: ladder exhausted; " + last_note);
}

/// Flat-boundary barrier with N^2 = 2 d^2 + 1 and M found by the same
/// doubling search on a dyadic ladder along the frame normal.
inline BarrierFunction flat_barrier(const ConvexDomain& domain, const RhsModel& model,
                                    const BoundaryFrame& frame, Rng& rng, double margin = 1e-6,
                                    std::size_t per_level = 48, int levels = 30) {
  GrowthParams growth = model.params();
  growth.k = 0;
  growth.a.clear();
  growth.eta.clear();
  exponents::require_admissible(growth, "flat_barrier");
  const int n = domain.dim();
  if (frame.normal_axis != n - 1)
    throw ParamDomainError("flat_barrier: frame normal must be the last axis");
  const double d = domain.diameter();

  BarrierFunction bf;
  bf.kind = BarrierKind::Flat;
  bf.params.growth = growth;
  bf.params.frame = frame;
  bf.params.d = d;
  bf.params.epsilon = 0.5;  // unused by the flat closed form
  bf.params.Lambda = std::sqrt(2.0 * d * d + 1.0);
  bf.params.mu = exponents::mu_flat(growth);
  bf.mu0 = bf.params.mu;
  bf.N = std::sqrt(2.0 * d * d + 1.0);

  std::vector<Vec> samples;
  double t_top = 0.0;
  for (double t = d; t > 1e-12 * d; t *= 0.5)
    if (domain.contains(frame.inward_point(t), 1e-12 * d)) {
      t_top = t;
      break;
    }
  if (t_top == 0.0) throw DomainError("flat_barrier: inward axis leaves domain");
  for (int m = 0; m < levels; ++m) {
    const double t = t_top * std::pow(2.0, -m);
    for (std::size_t s = 0; s < per_level; ++s) {
      Vec y(n, 0.0);
      y[n - 1] = t;
      for (int i = 0; i + 1 < n; ++i) y[i] = rng.uniform(-d, d);
      const Vec w = frame.to_world(y);
      if (domain.contains(w, 1e-14 * d)) samples.push_back(w);
    }
    Vec axis(n, 0.0);
    axis[n - 1] = t;
    const Vec w = frame.to_world(axis);
    if (domain.contains(w, 1e-14 * d)) samples.push_back(w);
  }

  std::string last_note = "no samples";
  for (double M = 1.0; M <= std::pow(2.0, 60); M *= 2.0) {
    bf.params.M = M;
    const auto sc = certify_subsolution(bf, model, domain, samples, margin);
    if (sc.pass) {
      bf.min_FW = sc.min_FW;
      bf.worst_point = sc.worst_point;
      return bf;
    }
    last_note = "min F[W]=" + std::to_string(sc.min_FW) + " at M=" + std::to_string(M);
  }
  throw SearchFailure("flat_barrier: M ladder exhausted; " + last_note);
}

}  // namespace mab
