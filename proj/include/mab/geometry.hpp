#pragma once

// Bounded convex domains given as intersections of implicit convex
// constraints g_j(x) < 0, with boundary-distance queries, support-ray
// boundary sampling, canonical boundary frames, and sample-based
// certification of the anisotropic boundary-convexity condition
//   Omega subset { x : x_{k+1} > sum_i eta_i |x_i|^{a_i} }   (frame coords).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mab/errors.hpp"
#include "mab/linalg.hpp"
#include "mab/rng.hpp"

namespace mab {

// ---------------------------------------------------------------------------
// Constraint primitives. Inside means g(x) < 0.
// ---------------------------------------------------------------------------

struct Halfspace {
  Vec normal;      // need not be unit
  double offset;   // inside: normal . x < offset

  double g(const Vec& x) const { return dot(normal, x) - offset; }
  Vec grad(const Vec&) const { return normal; }
  std::optional<double> boundary_distance(const Vec& x) const {
    return (offset - dot(normal, x)) / norm(normal);
  }
};

struct BallConstraint {
  Vec center;
  double radius;

  double g(const Vec& x) const { return norm(x - center) - radius; }
  Vec grad(const Vec& x) const {
    Vec d = x - center;
    const double r = norm(d);
    if (r < 1e-14) {
      d.assign(x.size(), 0.0);
      d[0] = 1.0;
      return d;
    }
    for (auto& c : d) c /= r;
    return d;
  }
  std::optional<double> boundary_distance(const Vec& x) const {
    return radius - norm(x - center);
  }
};

/// sum_i |x_i/s_i|^{p_i} < 1, convex for p_i >= 1.
struct Superellipse {
  std::vector<double> powers;
  std::vector<double> scales;

  double g(const Vec& x) const {
    double s = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += pow_real(std::abs(x[i] / scales[i]), powers[i]);
    return s;
  }
  Vec grad(const Vec& x) const {
    Vec gr(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double t = std::abs(x[i] / scales[i]);
      if (t > 0.0)
        gr[i] = powers[i] * pow_real(t, powers[i] - 1.0) *
                (x[i] >= 0.0 ? 1.0 : -1.0) / scales[i];
    }
    return gr;
  }
  std::optional<double> boundary_distance(const Vec&) const { return std::nullopt; }
};

/// Region above the power cup: x_{axis} > sum_{i<k} eta_i |x_i|^{a_i},
/// where axis = eta.size() (the cup consumes the first k coordinates).
struct PowerCup {
  std::vector<double> eta;
  std::vector<double> a;

  std::size_t axis() const { return eta.size(); }
  double g(const Vec& x) const {
    double s = -x[axis()];
    for (std::size_t i = 0; i < eta.size(); ++i)
      s += eta[i] * pow_real(std::abs(x[i]), a[i]);
    return s;
  }
  Vec grad(const Vec& x) const {
    Vec gr(x.size(), 0.0);
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const double t = std::abs(x[i]);
      if (t > 0.0)
        gr[i] = eta[i] * a[i] * pow_real(t, a[i] - 1.0) * (x[i] >= 0.0 ? 1.0 : -1.0);
    }
    gr[axis()] = -1.0;
    return gr;
  }
  std::optional<double> boundary_distance(const Vec&) const { return std::nullopt; }
};

/// Axis-aligned box as a single max-of-affine constraint.
struct BoxConstraint {
  Vec lo, hi;

  double g(const Vec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
      m = std::max(m, std::max(lo[i] - x[i], x[i] - hi[i]));
    return m;
  }
  Vec grad(const Vec& x) const {
    Vec gr(x.size(), 0.0);
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    double sign = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (lo[i] - x[i] > best) { best = lo[i] - x[i]; arg = i; sign = -1.0; }
      if (x[i] - hi[i] > best) { best = x[i] - hi[i]; arg = i; sign = 1.0; }
    }
    gr[arg] = sign;
    return gr;
  }
  std::optional<double> boundary_distance(const Vec& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
      d = std::min(d, std::min(x[i] - lo[i], hi[i] - x[i]));
    return d;
  }
};

using Constraint = std::variant<Halfspace, BallConstraint, Superellipse, PowerCup, BoxConstraint>;

inline double constraint_g(const Constraint& c, const Vec& x) {
  return std::visit([&](const auto& p) { return p.g(x); }, c);
}
inline Vec constraint_grad(const Constraint& c, const Vec& x) {
  return std::visit([&](const auto& p) { return p.grad(x); }, c);
}
inline std::optional<double> constraint_exact_distance(const Constraint& c, const Vec& x) {
  return std::visit([&](const auto& p) { return p.boundary_distance(x); }, c);
}

// ---------------------------------------------------------------------------
// ConvexDomain
// ---------------------------------------------------------------------------

struct BoundingBox {
  Vec lo, hi;
  double diagonal() const { return norm(hi - lo); }
};

class ConvexDomain {
 public:
  ConvexDomain(int n, std::vector<Constraint> constraints, BoundingBox bbox)
      : n_(n), constraints_(std::move(constraints)), bbox_(std::move(bbox)) {
    if (n_ < 1 || bbox_.lo.size() != static_cast<std::size_t>(n_) ||
        bbox_.hi.size() != static_cast<std::size_t>(n_))
      throw ParamDomainError("ConvexDomain: bbox dimension mismatch");
    for (int i = 0; i < n_; ++i)
      if (!(bbox_.lo[i] < bbox_.hi[i]) || !std::isfinite(bbox_.lo[i]) ||
          !std::isfinite(bbox_.hi[i]))
        throw ParamDomainError("ConvexDomain: bbox not finite/ordered");
    anchor_ = find_interior_anchor();
    diameter_ = estimate_diameter();
  }

  int dim() const { return n_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const BoundingBox& bbox() const { return bbox_; }
  double diameter() const { return diameter_; }
  const Vec& anchor() const { return anchor_; }

  /// max_j g_j; negative strictly inside.
  double level(const Vec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& c : constraints_) m = std::max(m, constraint_g(c, x));
    // Clip to the bounding box as well so every domain is bounded even when
    // the constraint list alone is not.
    for (int i = 0; i < n_; ++i)
      m = std::max(m, std::max(bbox_.lo[i] - x[i], x[i] - bbox_.hi[i]));
    return m;
  }

  bool contains(const Vec& x, double margin = 0.0) const { return level(x) < -margin; }

  /// Distance from a strictly interior point to the domain boundary.
  /// Exact for halfspace/ball/box constraints; iterative foot-point
  /// projection otherwise. Relative accuracy ~1e-8.
  double distance_to_boundary(const Vec& x) const {
    if (!contains(x)) throw DomainError("distance_to_boundary: point not strictly interior");
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : constraints_) {
      if (auto exact = constraint_exact_distance(c, x))
        d = std::min(d, *exact);
      else
        d = std::min(d, generic_surface_distance(c, x));
    }
    // bbox faces participate only when they actually cut the constraint set
    for (int i = 0; i < n_; ++i) {
      d = std::min(d, x[i] - bbox_.lo[i]);
      d = std::min(d, bbox_.hi[i] - x[i]);
    }
    return d;
  }

  /// First boundary crossing along the ray x0 + t*u, t in (0, t_max].
  /// Returns nullopt if the ray stays interior through t_max.
  std::optional<double> ray_to_boundary(const Vec& x0, const Vec& u, double t_max = -1.0) const {
    if (t_max <= 0.0) t_max = 2.0 * bbox_.diagonal();
    double lo = 0.0, hi = t_max;
    if (level(x0) >= 0.0) throw DomainError("ray_to_boundary: ray origin not interior");
    auto at = [&](double t) {
      Vec p = x0;
      for (int i = 0; i < n_; ++i) p[i] += t * u[i];
      return level(p);
    };
    if (at(hi) < 0.0) return std::nullopt;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, t_max); ++it) {
      const double mid = 0.5 * (lo + hi);
      (at(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Boundary point hit by the ray from the interior anchor along u.
  Vec boundary_point(const Vec& u) const {
    const auto t = ray_to_boundary(anchor_, u);
    if (!t) throw DomainError("boundary_point: ray did not exit the domain");
    Vec p = anchor_;
    for (int i = 0; i < n_; ++i) p[i] += *t * u[i];
    return p;
  }

  /// Deterministic quasi-uniform boundary sample (jittered directions).
  std::vector<Vec> sample_boundary(std::size_t count, Rng& rng) const {
    std::vector<Vec> pts;
    pts.reserve(count);
    if (n_ == 2) {
      for (std::size_t i = 0; i < count; ++i) {
        const double th = 6.283185307179586 * (static_cast<double>(i) + 0.5 * rng.uniform()) /
                          static_cast<double>(count);
        pts.push_back(boundary_point({std::cos(th), std::sin(th)}));
      }
    } else {
      for (std::size_t i = 0; i < count; ++i) pts.push_back(boundary_point(rng.direction(n_)));
    }
    return pts;
  }

 private:
  Vec find_interior_anchor() const {
    Vec c(n_);
    for (int i = 0; i < n_; ++i) c[i] = 0.5 * (bbox_.lo[i] + bbox_.hi[i]);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& con : constraints_) m = std::max(m, constraint_g(con, c));
    if (m < 0.0) return c;
    Rng rng(0x5eedull);
    Vec best = c;
    double best_m = m;
    for (int it = 0; it < 200000; ++it) {
      Vec p = rng.point_in_box(bbox_.lo, bbox_.hi);
      double mp = -std::numeric_limits<double>::infinity();
      for (const auto& con : constraints_) mp = std::max(mp, constraint_g(con, p));
      if (mp < best_m) {
        best_m = mp;
        best = p;
        if (best_m < 0.0) return best;
      }
    }
    throw ParamDomainError("ConvexDomain: could not find an interior point");
  }

  double estimate_diameter() const {
    Rng rng(0xd1a0ull);
    const std::size_t m = n_ == 2 ? 512 : 1024;
    const auto pts = sample_boundary(m, rng);
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        d = std::max(d, norm(pts[i] - pts[j]));
    return d;
  }

  /// Foot-point projection onto {g = 0} for a smooth convex constraint:
  /// march to the surface along the local gradient, then slide the surface
  /// point until x - p aligns with the surface normal.
  double generic_surface_distance(const Constraint& c, const Vec& x) const {
    const double scale = bbox_.diagonal();
    Vec u = constraint_grad(c, x);
    const double gn = norm(u);
    if (gn < 1e-14) return std::numeric_limits<double>::infinity();
    for (auto& v : u) v /= gn;

    auto cross_on_ray = [&](const Vec& dir) -> std::optional<Vec> {
      double lo = 0.0, hi = 2.0 * scale;
      auto at = [&](double t) {
        Vec p = x;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * dir[i];
        return constraint_g(c, p);
      };
      if (at(hi) < 0.0) return std::nullopt;
      for (int it = 0; it < 120; ++it) {
        const double mid = 0.5 * (lo + hi);
        (at(mid) < 0.0 ? lo : hi) = mid;
      }
      Vec p = x;
      const double t = 0.5 * (lo + hi);
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += t * dir[i];
      return p;
    };

    auto first = cross_on_ray(u);
    if (!first) return std::numeric_limits<double>::infinity();
    Vec p = *first;

    for (int it = 0; it < 200; ++it) {
      Vec nu = constraint_grad(c, p);
      const double nn = norm(nu);
      if (nn < 1e-14) break;
      for (auto& v : nu) v /= nn;
      Vec r = p - x;
      const double rn = dot(r, nu);
      Vec tang = r - rn * nu;
      const double tn = norm(tang);
      if (tn <= 1e-9 * std::max(norm(r), 1e-30)) break;
      // slide along the surface toward the foot point, then re-project
      for (std::size_t i = 0; i < p.size(); ++i) p[i] -= 0.8 * tang[i];
      for (int newton = 0; newton < 32; ++newton) {
        const double gv = constraint_g(c, p);
        if (std::abs(gv) < 1e-13 * std::max(1.0, scale)) break;
        Vec gp = constraint_grad(c, p);
        const double gg = dot(gp, gp);
        if (gg < 1e-28) break;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] -= gv * gp[i] / gg;
      }
    }
    return norm(p - x);
  }

  int n_;
  std::vector<Constraint> constraints_;
  BoundingBox bbox_;
  Vec anchor_;
  double diameter_ = 0.0;
};

// ---------------------------------------------------------------------------
// BoundaryFrame
// ---------------------------------------------------------------------------

/// Canonical frame at a boundary point x0: frame coordinates y = R (x - x0),
/// the inward normal maps to axis index `normal_axis`, and the domain lies in
/// { y_{normal_axis} > 0 }. Tangent axes keep world-axis order, declared
/// strictly convex directions first.
struct BoundaryFrame {
  Vec origin;
  Mat rotation;      // rows are the frame axes in world coordinates
  int normal_axis;   // 0-based; equals k for a k-convex contact frame

  int dim() const { return static_cast<int>(origin.size()); }

  Vec to_frame(const Vec& x) const { return rotation.apply(x - origin); }
  Vec to_world(const Vec& y) const { return origin + rotation.apply_transpose(y); }

  /// World point at frame coordinates (0, ..., 0, t, 0, ..., 0), t on the
  /// inward normal slot.
  Vec inward_point(double t) const {
    Vec y(origin.size(), 0.0);
    y[normal_axis] = t;
    return to_world(y);
  }
};

/// Length of the inward-normal chord from the frame origin: the largest t
/// with origin + t * normal still inside the domain.
inline double inward_ray_extent(const ConvexDomain& domain, const BoundaryFrame& frame) {
  double lo = 0.0, hi = 1.25 * domain.diameter();
  const double probe = 1e-9 * domain.diameter();
  if (!domain.contains(frame.inward_point(probe)))
    throw DomainError("inward_ray_extent: inward normal leaves the domain immediately");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (domain.contains(frame.inward_point(std::max(mid, probe))) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Unit inward normal at x0: mean of active-constraint gradients, negated.
inline Vec inward_normal_at(const ConvexDomain& domain, const Vec& x0, double active_tol) {
  Vec acc(domain.dim(), 0.0);
  bool any = false;
  for (const auto& c : domain.constraints()) {
    if (std::abs(constraint_g(c, x0)) <= active_tol) {
      Vec g = constraint_grad(c, x0);
      const double gn = norm(g);
      if (gn > 1e-14) {
        for (int i = 0; i < domain.dim(); ++i) acc[i] += g[i] / gn;
        any = true;
      }
    }
  }
  for (int i = 0; i < domain.dim(); ++i) {
    const double lo_gap = x0[i] - domain.bbox().lo[i];
    const double hi_gap = domain.bbox().hi[i] - x0[i];
    if (std::abs(lo_gap) <= active_tol) { acc[i] -= 1.0; any = true; }
    if (std::abs(hi_gap) <= active_tol) { acc[i] += 1.0; any = true; }
  }
  if (!any) throw DomainError("inward_normal_at: point is not on the boundary");
  const double an = norm(acc);
  if (an < 1e-12) throw FrameError("inward_normal_at: degenerate normal");
  for (auto& v : acc) v /= -an;
  return acc;
}

/// Build the canonical contact frame at x0 with the normal on axis index k.
inline BoundaryFrame build_frame(const ConvexDomain& domain, const Vec& x0, int k) {
  const int n = domain.dim();
  if (k < 0 || k > n - 1) throw ParamDomainError("build_frame: k out of range");
  const double scale = std::max(1.0, domain.diameter());
  if (std::abs(domain.level(x0)) > 1e-7 * scale)
    throw DomainError("build_frame: x0 is not on the boundary");
  const Vec nu = inward_normal_at(domain, x0, 1e-7 * scale);

  // Gram-Schmidt the standard basis against the normal; keeps tangent axes
  // aligned with world axes whenever possible.
  std::vector<Vec> tangents;
  for (int i = 0; i < n && static_cast<int>(tangents.size()) < n - 1; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    Vec t = e - dot(e, nu) * nu;
    for (const auto& prev : tangents) t = t - dot(t, prev) * prev;
    const double tn = norm(t);
    if (tn > 1e-8) {
      for (auto& v : t) v /= tn;
      tangents.push_back(t);
    }
  }
  if (static_cast<int>(tangents.size()) != n - 1)
    throw FrameError("build_frame: failed to complete the tangent basis");

  Mat R(n, n);
  int trow = 0;
  for (int row = 0; row < n; ++row) {
    const Vec& src = (row == k) ? nu : tangents[trow++];
    for (int j = 0; j < n; ++j) R(row, j) = src[j];
  }
  if (det(R) < 0.0) {
    const int last = (k == n - 1) ? n - 2 : n - 1;
    for (int j = 0; j < n; ++j) R(last, j) = -R(last, j);
  }
  return BoundaryFrame{x0, std::move(R), k};
}

// ---------------------------------------------------------------------------
// k-strict-convexity certification
// ---------------------------------------------------------------------------

struct ConvexityCertificate {
  BoundaryFrame frame;
  int k = 0;
  std::vector<double> a;
  std::vector<double> eta;
  double margin = 0.0;       ///< smallest slack over the verification sample
  std::size_t samples = 0;
};

struct ConvexityOutcome {
  std::optional<ConvexityCertificate> certificate;
  Vec worst_point;           ///< world coordinates of the tightest/violating sample
  double worst_slack = 0.0;

  bool ok() const { return certificate.has_value(); }
};

/// Verify, on a dense boundary sample, that the domain lies above the power
/// cup of the contact frame at x0. Slack at a sample y (frame coords) is
/// y_{k+1} - sum eta_i |y_i|^{a_i}; the certificate carries the minimum.
inline ConvexityOutcome certify_k_convexity(const ConvexDomain& domain, const Vec& x0, int k,
                                            const std::vector<double>& a,
                                            const std::vector<double>& eta,
                                            std::size_t sample_count, Rng& rng,
                                            double tol = -1.0) {
  if (k < 1 || k > domain.dim() - 1)
    throw ParamDomainError("certify_k_convexity: k out of range");
  if (a.size() != static_cast<std::size_t>(k) || eta.size() != static_cast<std::size_t>(k))
    throw ParamDomainError("certify_k_convexity: a/eta length mismatch");
  for (double ai : a)
    if (ai < 1.0) throw ParamDomainError("certify_k_convexity: a_i < 1");
  for (double ei : eta)
    if (ei <= 0.0) throw ParamDomainError("certify_k_convexity: eta_i <= 0");

  BoundaryFrame frame = build_frame(domain, x0, k);
  if (tol < 0.0) tol = 1e-6 * std::max(1.0, domain.diameter());

  const auto pts = domain.sample_boundary(sample_count, rng);
  double worst = std::numeric_limits<double>::infinity();
  Vec worst_pt = x0;
  for (const auto& p : pts) {
    const Vec y = frame.to_frame(p);
    double cup = 0.0;
    for (int i = 0; i < k; ++i) cup += eta[i] * pow_real(std::abs(y[i]), a[i]);
    const double slack = y[k] - cup;
    if (slack < worst) {
      worst = slack;
      worst_pt = p;
    }
  }

  ConvexityOutcome out;
  out.worst_point = worst_pt;
  out.worst_slack = worst;
  if (worst >= -tol) {
    out.certificate = ConvexityCertificate{std::move(frame), k, a, eta,
                                           std::max(0.0, worst), pts.size()};
  }
  return out;
}

}  // namespace mab
