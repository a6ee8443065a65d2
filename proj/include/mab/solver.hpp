#pragma once

// Monotone wide-stencil finite-difference solver for
//   det D^2 u = F(x, u, Du) in Omega,  u = 0 on dOmega,  n = 2.
// det D^2 is discretized as the minimum over orthogonal lattice-direction
// pairs of products of positive-part second differences, with Shortley-
// Weller boundary cuts carrying u = 0. The outer loop is a damped nonlinear
// Gauss-Seidel in red-black order; each node value solves its one-node
// equation by scalar bisection (the node map is monotone).

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "mab/barrier.hpp"
#include "mab/errors.hpp"
#include "mab/geometry.hpp"
#include "mab/linalg.hpp"
#include "mab/rhs.hpp"

namespace mab {

struct SolveConfig {
  double h = 1.0 / 64.0;
  int stencil_width = 2;   // 1: axes; 2: +diagonals; 3: +knight directions
  double damping = 1.0;    // (0, 1]
  double tol = 1e-8;       // sup-norm update threshold
  long max_iters = 30000;  // sweeps
  double z_floor = 1e-8;   // |z| clamp in F evaluation
  double comparison_C = 1.0;  // tol_geom = C sqrt(h) in the discrete comparison
};

class IterationLimit : public NonConvergence {
 public:
  IterationLimit(const std::string& msg, std::vector<double> history)
      : NonConvergence(msg), update_history(std::move(history)) {}
  std::vector<double> update_history;
};

struct Grid {
  double h = 0.0;
  int stencil_width = 2;

  struct Leg {
    int nbr = -1;      // node index; -1 means the leg is cut by the boundary
    double len = 0.0;  // distance to the neighbor or to the boundary cut
  };

  std::vector<std::array<int, 2>> dirs;  // paired: (2p, 2p+1) are orthogonal
  std::vector<double> xs, ys;            // node world coordinates
  std::vector<double> dist;              // memoized d_x per node
  std::vector<Leg> legs;                 // [node][dir][plus/minus] flattened
  std::vector<int> parity;               // (i+j) & 1, for red-black sweeps

  std::size_t size() const { return xs.size(); }
  const Leg& leg(int node, int dir, int side) const {
    return legs[(static_cast<std::size_t>(node) * dirs.size() + dir) * 2 + side];
  }
};

inline std::vector<std::array<int, 2>> stencil_directions(int width) {
  if (width < 1 || width > 3) throw ParamDomainError("stencil_width must be 1, 2 or 3");
  std::vector<std::array<int, 2>> d = {{1, 0}, {0, 1}};
  if (width >= 2) {
    d.push_back({1, 1});
    d.push_back({1, -1});
  }
  if (width >= 3) {
    d.push_back({1, 2});
    d.push_back({2, -1});
    d.push_back({2, 1});
    d.push_back({1, -2});
  }
  return d;
}

/// Classify lattice nodes (lattice anchored at the origin, spacing h) and
/// compute boundary cuts along every stencil leg by bisection.
inline Grid build_grid(const ConvexDomain& domain, double h, int stencil_width = 2) {
  if (domain.dim() != 2) throw ParamDomainError("build_grid: solver is 2-D only");
  if (!(h > 0.0) || !(h < domain.diameter() / 4.0))
    throw ParamDomainError("build_grid: require 0 < h < diameter/4");

  Grid g;
  g.h = h;
  g.stencil_width = stencil_width;
  g.dirs = stencil_directions(stencil_width);

  const auto& bb = domain.bbox();
  const int ilo = static_cast<int>(std::floor(bb.lo[0] / h)) - 1;
  const int ihi = static_cast<int>(std::ceil(bb.hi[0] / h)) + 1;
  const int jlo = static_cast<int>(std::floor(bb.lo[1] / h)) - 1;
  const int jhi = static_cast<int>(std::ceil(bb.hi[1] / h)) + 1;
  const int nx = ihi - ilo + 1, ny = jhi - jlo + 1;

  std::vector<int> node_at(static_cast<std::size_t>(nx) * ny, -1);
  auto cell = [&](int i, int j) -> int& {
    return node_at[static_cast<std::size_t>(i - ilo) * ny + (j - jlo)];
  };

  std::vector<std::array<int, 2>> idx;
  for (int i = ilo; i <= ihi; ++i)
    for (int j = jlo; j <= jhi; ++j) {
      const Vec p = {i * h, j * h};
      if (domain.contains(p)) {
        cell(i, j) = static_cast<int>(idx.size());
        idx.push_back({i, j});
      }
    }
  if (idx.empty()) throw ParamDomainError("build_grid: empty interior at this resolution");

  const std::size_t nn = idx.size();
  g.xs.resize(nn);
  g.ys.resize(nn);
  g.dist.resize(nn);
  g.parity.resize(nn);
  g.legs.resize(nn * g.dirs.size() * 2);

  for (std::size_t node = 0; node < nn; ++node) {
    const int i = idx[node][0], j = idx[node][1];
    const Vec p = {i * h, j * h};
    g.xs[node] = p[0];
    g.ys[node] = p[1];
    g.parity[node] = (i + j) & 1;
    g.dist[node] = domain.distance_to_boundary(p);
    for (std::size_t dir = 0; dir < g.dirs.size(); ++dir) {
      const int vi = g.dirs[dir][0], vj = g.dirs[dir][1];
      const double vlen = std::sqrt(static_cast<double>(vi * vi + vj * vj)) * h;
      for (int side = 0; side < 2; ++side) {
        const int sgn = side == 0 ? 1 : -1;
        const int ni = i + sgn * vi, nj = j + sgn * vj;
        Grid::Leg leg;
        const bool in_lattice = ni >= ilo && ni <= ihi && nj >= jlo && nj <= jhi;
        const int nbr = in_lattice ? cell(ni, nj) : -1;
        if (nbr >= 0) {
          leg.nbr = nbr;
          leg.len = vlen;
        } else {
          // bisect the crossing of the domain boundary on the leg
          double lo = 0.0, hi = 1.0;
          for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Vec q = {p[0] + mid * sgn * vi * h, p[1] + mid * sgn * vj * h};
            (domain.contains(q) ? lo : hi) = mid;
          }
          leg.nbr = -1;
          leg.len = std::max(0.5 * (lo + hi) * vlen, 1e-12);
        }
        g.legs[(node * g.dirs.size() + dir) * 2 + side] = leg;
      }
    }
  }
  return g;
}

/// Centered second difference along direction dir at a node, with
/// Shortley-Weller interpolation (u = 0) at boundary cuts.
inline double second_difference(const Grid& g, const std::vector<double>& u, int node, int dir) {
  const auto& lp = g.leg(node, dir, 0);
  const auto& lm = g.leg(node, dir, 1);
  const double up = lp.nbr >= 0 ? u[lp.nbr] : 0.0;
  const double um = lm.nbr >= 0 ? u[lm.nbr] : 0.0;
  return 2.0 * (lm.len * up + lp.len * um - (lp.len + lm.len) * u[node]) /
         (lp.len * lm.len * (lp.len + lm.len));
}

/// Wide-stencil Monge-Ampere operator: min over orthogonal direction pairs
/// of the product of positive-part second differences.
inline double ma_ws(const Grid& g, const std::vector<double>& u, int node) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p + 1 < g.dirs.size(); p += 2) {
    const double da = std::max(second_difference(g, u, node, static_cast<int>(p)), 0.0);
    const double db = std::max(second_difference(g, u, node, static_cast<int>(p + 1)), 0.0);
    best = std::min(best, da * db);
  }
  return best;
}

struct SolverState {
  std::vector<double> u;
  std::vector<double> residual;
  long iterations = 0;
  double last_update = 0.0;
  bool converged = false;
  std::vector<double> update_history;
};

namespace detail {

/// Node-wise F coefficients: F(z, q) = An * max(-z, z_floor)^{-alpha} * (1+q^2)^{gamma/2}.
struct RhsCoeffs {
  double alpha = 0.0;
  double gamma = 0.0;
  std::vector<double> An;  // A * d_x^{beta-(n+1)} per node
};

inline RhsCoeffs rhs_coeffs(const Grid& g, const RhsModel& model) {
  RhsCoeffs c;
  const auto& p = model.params();
  c.alpha = p.alpha;
  c.gamma = p.gamma;
  c.An.resize(g.size());
  const double degeneracy = p.beta - (p.n + 1.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    c.An[i] = p.A * (degeneracy != 0.0 ? pow_real(g.dist[i], degeneracy) : 1.0);
  return c;
}

/// Non-uniform centered first derivative along an axis direction.
inline double first_difference(const Grid& g, const std::vector<double>& u, int node, int dir) {
  const auto& lp = g.leg(node, dir, 0);
  const auto& lm = g.leg(node, dir, 1);
  const double up = lp.nbr >= 0 ? u[lp.nbr] : 0.0;
  const double um = lm.nbr >= 0 ? u[lm.nbr] : 0.0;
  const double tp = lp.len, tm = lm.len;
  return (tm * tm * up - tp * tp * um + (tp * tp - tm * tm) * u[node]) / (tp * tm * (tp + tm));
}

}  // namespace detail

/// Damped nonlinear Gauss-Seidel solve. init may be a certified barrier
/// (sampled as the start field) or nullptr for the zero start; warm_start,
/// when given, overrides both.
inline SolverState solve([[maybe_unused]] const ConvexDomain& domain, const Grid& grid,
                         const RhsModel& model, const SolveConfig& cfg,
                         const BarrierFunction* init = nullptr,
                         const std::vector<double>* warm_start = nullptr) {
  if (!model.monotone_in_z())
    throw ParamDomainError("solve: F must be non-decreasing in z (alpha >= 0)");
  if (!(cfg.tol > 0.0) || !(cfg.z_floor > 0.0) || !(cfg.damping > 0.0) || cfg.damping > 1.0)
    throw ParamDomainError("solve: bad config (tol, z_floor, damping)");

  const std::size_t nn = grid.size();
  SolverState st;
  st.u.assign(nn, 0.0);
  if (warm_start) {
    if (warm_start->size() != nn) throw ParamDomainError("solve: warm start size mismatch");
    for (std::size_t i = 0; i < nn; ++i) st.u[i] = std::min(0.0, (*warm_start)[i]);
  } else if (init) {
    for (std::size_t i = 0; i < nn; ++i)
      st.u[i] = std::min(0.0, init->value_world({grid.xs[i], grid.ys[i]}));
  }

  const auto coeffs = detail::rhs_coeffs(grid, model);
  const std::size_t ndirs = grid.dirs.size();
  std::vector<double> alpha_v(ndirs), beta_v(ndirs);

  auto eval_F = [&](std::size_t node, double t, double gq) {
    const double az = std::max(-t, cfg.z_floor);
    return coeffs.An[node] * pow_real(az, -coeffs.alpha) * gq;
  };

  std::vector<int> order(nn);
  {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < nn; ++i)
      if (grid.parity[i] == 0) order[pos++] = static_cast<int>(i);
    for (std::size_t i = 0; i < nn; ++i)
      if (grid.parity[i] == 1) order[pos++] = static_cast<int>(i);
  }

  double prev_update = std::numeric_limits<double>::infinity();
  for (long sweep = 1; sweep <= cfg.max_iters; ++sweep) {
    double sup_update = 0.0;
    double field_min = 0.0;
    for (double v : st.u) field_min = std::min(field_min, v);
    const double bis_floor = std::max(1e-15, 1e-4 * cfg.tol);
    const double window = 4.0 * std::max(prev_update, cfg.tol);

    for (int node : order) {
      // frozen gradient and per-direction affine second differences
      const double gx = detail::first_difference(grid, st.u, node, 0);
      const double gy = detail::first_difference(grid, st.u, node, 1);
      const double gq = coeffs.gamma != 0.0
                            ? std::pow(1.0 + gx * gx + gy * gy, 0.5 * coeffs.gamma)
                            : 1.0;
      for (std::size_t dir = 0; dir < ndirs; ++dir) {
        const auto& lp = grid.leg(node, static_cast<int>(dir), 0);
        const auto& lm = grid.leg(node, static_cast<int>(dir), 1);
        const double up = lp.nbr >= 0 ? st.u[lp.nbr] : 0.0;
        const double um = lm.nbr >= 0 ? st.u[lm.nbr] : 0.0;
        alpha_v[dir] = 2.0 * (lm.len * up + lp.len * um) / (lp.len * lm.len * (lp.len + lm.len));
        beta_v[dir] = 2.0 / (lp.len * lm.len);
      }
      auto scheme = [&](double t) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < ndirs; p += 2) {
          const double da = std::max(alpha_v[p] - beta_v[p] * t, 0.0);
          const double db = std::max(alpha_v[p + 1] - beta_v[p + 1] * t, 0.0);
          best = std::min(best, da * db);
        }
        return best;
      };

      // phi(t) = scheme(t) - F(t) decreases as t increases; the root lives
      // in [2 min u, 0]. Once sweeps stabilize, bracket locally around the
      // current value (roots move by at most a few sup-updates per sweep)
      // and fall back to the global bracket when that window misses.
      auto phi = [&](double t) { return scheme(t) - eval_F(node, t, gq); };
      double lo = 0.0, hi = 0.0;
      bool bracketed = false;
      if (std::isfinite(window)) {
        lo = st.u[node] - window;
        hi = std::min(0.0, st.u[node] + window);
        bracketed = phi(lo) >= 0.0 && phi(hi) <= 0.0;
      }
      if (!bracketed) {
        lo = std::min(2.0 * field_min, -1.0);
        hi = 0.0;
        int guard = 0;
        while (phi(lo) < 0.0 && guard++ < 30) lo *= 2.0;
      }
      for (int it = 0; it < 60 && hi - lo > bis_floor; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) >= 0.0 ? lo : hi) = mid;
      }
      const double t_star = 0.5 * (lo + hi);
      const double u_new = st.u[node] + cfg.damping * (t_star - st.u[node]);
      sup_update = std::max(sup_update, std::abs(u_new - st.u[node]));
      st.u[node] = u_new;
    }

    st.iterations = sweep;
    st.last_update = sup_update;
    st.update_history.push_back(sup_update);
    prev_update = sup_update;
    if (sup_update < cfg.tol) {
      st.converged = true;
      break;
    }
  }

  // residual at the final field
  st.residual.resize(nn);
  for (std::size_t node = 0; node < nn; ++node) {
    const double gx = detail::first_difference(grid, st.u, static_cast<int>(node), 0);
    const double gy = detail::first_difference(grid, st.u, static_cast<int>(node), 1);
    const double gq = coeffs.gamma != 0.0
                          ? std::pow(1.0 + gx * gx + gy * gy, 0.5 * coeffs.gamma)
                          : 1.0;
    const double az = std::max(-st.u[node], cfg.z_floor);
    const double F = coeffs.An[node] * pow_real(az, -coeffs.alpha) * gq;
    st.residual[node] = ma_ws(grid, st.u, static_cast<int>(node)) - F;
  }

  if (!st.converged)
    throw IterationLimit("solve: iteration limit before tolerance (last update " +
                             std::to_string(st.last_update) + ")",
                         st.update_history);
  return st;
}

struct ComparisonReport {
  bool pass = true;
  int worst_node = -1;
  double worst_violation = 0.0;  // max of (W - tol_allow) - u, positive means failure
  double tol_geom = 0.0;
};

/// Discrete comparison against a certified barrier:
/// u >= W - tol_geom (1 + |W|) at every node, tol_geom = C sqrt(h).
inline ComparisonReport discrete_comparison_check(const Grid& grid, const SolverState& st,
                                                  const BarrierFunction& barrier,
                                                  double tol_geom = -1.0) {
  ComparisonReport rep;
  rep.tol_geom = tol_geom > 0.0 ? tol_geom : std::sqrt(grid.h);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = barrier.value_world({grid.xs[i], grid.ys[i]});
    const double allow = rep.tol_geom * (1.0 + std::abs(w));
    const double viol = (w - allow) - st.u[i];
    if (viol > rep.worst_violation) {
      rep.worst_violation = viol;
      rep.worst_node = static_cast<int>(i);
      rep.pass = false;
    }
  }
  return rep;
}

/// (d_x, |u|) pairs for nodes on the inward-normal column through x0, up to
/// t_max along the ray (so layers at the far side of the domain, where d_x
/// is governed by a different boundary piece, stay out of the fit). The
/// normal must be axis-aligned (the canonical contact configurations).
inline std::vector<std::pair<double, double>> ray_pairs(
    const Grid& grid, const SolverState& st, const Vec& x0, int normal_coord,
    double t_max = std::numeric_limits<double>::infinity()) {
  std::vector<std::pair<double, double>> out;
  const int tang = 1 - normal_coord;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double xy[2] = {grid.xs[i], grid.ys[i]};
    if (std::abs(xy[tang] - x0[tang]) >= 0.25 * grid.h) continue;
    const double t = std::abs(xy[normal_coord] - x0[normal_coord]);
    if (t > t_max) continue;
    out.emplace_back(grid.dist[i], std::abs(st.u[i]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace mab
