#pragma once

// Boundary-rate estimation and Holder-norm bookkeeping: log-log regression
// of |u| against d, the pointwise bound check |u| <= C d^mu, the Holder
// constant C (1 + diam^mu), and an empirical Holder seminorm over node pairs.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "mab/errors.hpp"
#include "mab/rng.hpp"
#include "mab/solver.hpp"

namespace mab {

struct RateReport {
  double mu_theory = 0.0;
  double mu_fitted = 0.0;
  double C_fitted = 0.0;
  double d_lo = 0.0, d_hi = 0.0;
  double residual_rms = 0.0;
  double bound_slack = 0.0;  ///< min of C d^mu - |u| over the checked points
  std::size_t points = 0;
};

using RatePairs = std::vector<std::pair<double, double>>;  // (d, |u|)

/// Least-squares fit of log|u| on log d. Requires >= 8 points spanning at
/// least two dyadic octaves of d.
inline RateReport fit_rate(const RatePairs& pairs, double mu_theory = 0.0) {
  for (const auto& [d, au] : pairs)
    if (!(d > 0.0) || !(au > 0.0))
      throw ParamDomainError("fit_rate: requires d > 0 and |u| > 0");
  if (pairs.size() < 8) throw InsufficientDataError("fit_rate: fewer than 8 points");
  double d_lo = pairs.front().first, d_hi = pairs.front().first;
  for (const auto& [d, au] : pairs) {
    d_lo = std::min(d_lo, d);
    d_hi = std::max(d_hi, d);
  }
  if (std::log2(d_hi / d_lo) < 2.0)
    throw InsufficientDataError("fit_rate: range under two octaves");

  const double n = static_cast<double>(pairs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [d, au] : pairs) {
    const double x = std::log(d), y = std::log(au);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;

  RateReport rep;
  rep.mu_theory = mu_theory;
  rep.mu_fitted = slope;
  rep.C_fitted = std::exp(intercept);
  rep.d_lo = d_lo;
  rep.d_hi = d_hi;
  rep.points = pairs.size();
  double ss = 0.0;
  for (const auto& [d, au] : pairs) {
    const double r = std::log(au) - (intercept + slope * std::log(d));
    ss += r * r;
  }
  rep.residual_rms = std::sqrt(ss / n);
  double slack = std::numeric_limits<double>::infinity();
  for (const auto& [d, au] : pairs)
    slack = std::min(slack, rep.C_fitted * std::pow(d, rep.mu_fitted) - au);
  rep.bound_slack = slack;
  return rep;
}

struct BoundCheck {
  bool pass = true;
  double worst_ratio = 0.0;  ///< max over points of |u| / (C d^mu)
  std::pair<double, double> worst_pair{0.0, 0.0};
};

/// Pointwise |u| <= C d^{mu_theory}.
inline BoundCheck check_bound(const RatePairs& pairs, double mu_theory, double C) {
  BoundCheck out;
  for (const auto& pr : pairs) {
    const double bound = C * std::pow(pr.first, mu_theory);
    const double ratio = pr.second / bound;
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_pair = pr;
    }
  }
  out.pass = out.worst_ratio <= 1.0;
  return out;
}

/// Holder-seminorm constant C (1 + diameter^mu).
inline double holder_constant(double C, double mu, double diameter) {
  if (!(mu > 0.0) || mu > 1.0 || !(C > 0.0))
    throw ParamDomainError("holder_constant: require 0 < mu <= 1 and C > 0");
  return C * (1.0 + std::pow(diameter, mu));
}

/// max over random node pairs of |u(x) - u(y)| / |x - y|^mu.
inline double empirical_holder_seminorm(const Grid& grid, const std::vector<double>& u,
                                        double mu, std::size_t pair_count, Rng& rng) {
  const std::size_t nn = grid.size();
  if (nn < 2) throw ParamDomainError("empirical_holder_seminorm: grid too small");
  double best = 0.0;
  for (std::size_t s = 0; s < pair_count; ++s) {
    const std::size_t i = rng.bits() % nn;
    std::size_t j = rng.bits() % nn;
    if (j == i) j = (j + 1) % nn;
    const double dx = grid.xs[i] - grid.xs[j];
    const double dy = grid.ys[i] - grid.ys[j];
    const double r = std::sqrt(dx * dx + dy * dy);
    best = std::max(best, std::abs(u[i] - u[j]) / std::pow(r, mu));
  }
  return best;
}

}  // namespace mab
