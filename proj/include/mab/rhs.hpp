#pragma once

// Right-hand-side family F(x, z, q) of the Monge-Ampere problem:
//   power_law       F = A * d_x^{beta-(n+1)} * |z|^{-alpha} * (1+|q|^2)^{gamma/2}
//   pure_hyperbolic F = |z|^{-(n+2)}
// The pure hyperbolic kind is the power law with A=1, beta=n+1, alpha=n+2,
// gamma=0 and needs no domain. F is non-decreasing in z on (-inf, 0) iff
// alpha >= 0, which is what the solver's fixed point requires; the barrier
// needs only the upper-bound structure and accepts any admissible alpha.

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "mab/errors.hpp"
#include "mab/exponents.hpp"
#include "mab/geometry.hpp"
#include "mab/linalg.hpp"
#include "mab/rng.hpp"

namespace mab {

enum class RhsKind { PowerLaw, PureHyperbolic };

class RhsModel {
 public:
  /// Pure hyperbolic kind: F = |z|^{-(n+2)}.
  static RhsModel pure_hyperbolic(int n) {
    GrowthParams p;
    p.n = n;
    p.k = 0;
    p.alpha = n + 2.0;
    p.beta = n + 1.0;
    p.gamma = 0.0;
    p.A = 1.0;
    return RhsModel(RhsKind::PureHyperbolic, p, nullptr);
  }

  /// Extremal power-law kind; the domain supplies d_x when beta > n+1.
  /// Only the F-level structure is enforced here (A > 0, beta >= n+1); the
  /// mu-interval admissibility belongs to the barrier path, which
  /// re-validates the merged growth parameters.
  static RhsModel power_law(const GrowthParams& p, std::shared_ptr<const ConvexDomain> domain) {
    if (!(p.A > 0.0)) throw ParamDomainError("RhsModel::power_law: A > 0 required");
    if (p.beta < p.n + 1.0) throw ParamDomainError("RhsModel::power_law: beta >= n+1 required");
    if (p.beta > p.n + 1.0 && !domain)
      throw ParamDomainError("RhsModel::power_law: beta > n+1 requires a domain for d_x");
    return RhsModel(RhsKind::PowerLaw, p, std::move(domain));
  }

  RhsKind kind() const { return kind_; }
  const GrowthParams& params() const { return params_; }
  int dim() const { return params_.n; }
  const std::shared_ptr<const ConvexDomain>& domain() const { return domain_; }

  /// F is non-decreasing in z on (-inf,0) iff alpha >= 0.
  bool monotone_in_z() const { return params_.alpha >= 0.0; }

  bool uses_distance() const {
    return kind_ == RhsKind::PowerLaw && params_.beta != params_.n + 1.0;
  }

  /// Evaluate with a precomputed boundary distance (grid nodes memoize d_x).
  double eval_with_distance(double d_x, double z, double q_norm2) const {
    if (z >= 0.0) throw DomainError("RhsModel: F is singular at z >= 0");
    const double az = -z;
    if (kind_ == RhsKind::PureHyperbolic) return pow_real(az, -(params_.n + 2.0));
    double f = params_.A * pow_real(az, -params_.alpha);
    if (params_.beta != params_.n + 1.0)
      f *= pow_real(d_x, params_.beta - (params_.n + 1.0));
    if (params_.gamma != 0.0) f *= std::pow(1.0 + q_norm2, 0.5 * params_.gamma);
    return f;
  }

  double eval(const Vec& x, double z, const Vec& q) const {
    double d_x = 1.0;
    if (uses_distance()) d_x = domain_->distance_to_boundary(x);
    return eval_with_distance(d_x, z, dot(q, q));
  }

 private:
  RhsModel(RhsKind kind, GrowthParams params, std::shared_ptr<const ConvexDomain> domain)
      : kind_(kind), params_(std::move(params)), domain_(std::move(domain)) {}

  RhsKind kind_;
  GrowthParams params_;
  std::shared_ptr<const ConvexDomain> domain_;
};

struct StructureViolation {
  std::string what;    // "positivity" | "monotonicity" | "rotation_invariance"
  Vec x;
  double z1 = 0.0, z2 = 0.0;
  double f1 = 0.0, f2 = 0.0;
};

/// Randomized structure check over any model exposing dim(), eval(x, z, q)
/// and (optionally) a domain for interior sampling: positivity, monotonicity
/// in z, and rotation invariance in q. Reporting only, never throws on a
/// violated property.
template <class Model>
std::vector<StructureViolation> check_structure(const Model& model,
                                                const ConvexDomain& domain,
                                                std::size_t sample_count, Rng& rng) {
  std::vector<StructureViolation> out;
  const int n = model.dim();
  for (std::size_t s = 0; s < sample_count; ++s) {
    Vec x;
    do {
      x = rng.point_in_box(domain.bbox().lo, domain.bbox().hi);
    } while (!domain.contains(x, 1e-9));
    const double z2 = -std::exp(rng.uniform(-3.0, 1.0));   // z2 in (-e, -e^-3)
    const double z1 = z2 - std::exp(rng.uniform(-3.0, 1.0));  // z1 < z2 < 0
    Vec q(n);
    for (auto& c : q) c = rng.normal();

    const double f1 = model.eval(x, z1, q);
    const double f2 = model.eval(x, z2, q);
    if (!(f1 > 0.0) || !(f2 > 0.0))
      out.push_back({"positivity", x, z1, z2, f1, f2});
    if (f1 > f2 * (1.0 + 1e-12))
      out.push_back({"monotonicity", x, z1, z2, f1, f2});

    // Givens rotation in a random coordinate plane.
    Vec qr = q;
    const int i1 = static_cast<int>(rng.bits() % n);
    int i2 = static_cast<int>(rng.bits() % n);
    if (i2 == i1) i2 = (i1 + 1) % n;
    const double th = rng.uniform(0.0, 6.283185307179586);
    qr[i1] = std::cos(th) * q[i1] - std::sin(th) * q[i2];
    qr[i2] = std::sin(th) * q[i1] + std::cos(th) * q[i2];
    const double fr = model.eval(x, z2, qr);
    if (std::abs(fr - f2) > 1e-12 * std::max(1.0, std::abs(f2)))
      out.push_back({"rotation_invariance", x, z2, z2, f2, fr});
  }
  return out;
}

}  // namespace mab
