#pragma once

// Structure constants of the degenerate-singular Monge-Ampere growth class
// and the exponent calculus built on them: the aggregate convexity sum
// abar = sum 2/a_i, the sharp boundary exponent mu, its flat-boundary
// counterpart mu0, and the barrier shape powers b_i.

#include <cstddef>
#include <string>
#include <vector>

#include "mab/errors.hpp"

namespace mab {

/// Structure constants (n, k, a_i, eta_i, alpha, beta, gamma, A) of the
/// right-hand-side growth class, plus everything derived from them.
struct GrowthParams {
  int n = 2;                  ///< ambient dimension, >= 2
  int k = 0;                  ///< number of strictly convex directions, 0 <= k <= n-1
  std::vector<double> a;      ///< convexity powers, length k, each >= 1
  std::vector<double> eta;    ///< convexity moduli, length k, each > 0
  double alpha = 0.0;         ///< singularity power of |z|
  double beta = 3.0;          ///< boundary degeneracy power
  double gamma = 0.0;         ///< gradient power
  double A = 1.0;             ///< structure constant, > 0
};

enum class Violation {
  ShapeMismatch,   // n < 2, k out of [0, n-1], or array lengths != k
  APowerBelowOne,  // some a_i < 1
  EtaNonPositive,  // some eta_i <= 0
  ANonPositive,    // A <= 0
  BetaTooSmall,    // beta < n + 1
  MuNumeratorNonPositive,  // abar + beta - n - gamma + 1 <= 0
  MuNotBelowOne,           // abar + beta - n - gamma + 1 >= n + alpha - gamma
};

inline std::string to_string(Violation v) {
  switch (v) {
    case Violation::ShapeMismatch: return "shape mismatch (n, k, or array lengths)";
    case Violation::APowerBelowOne: return "a_i >= 1 violated";
    case Violation::EtaNonPositive: return "eta_i > 0 violated";
    case Violation::ANonPositive: return "A > 0 violated";
    case Violation::BetaTooSmall: return "beta >= n+1 violated";
    case Violation::MuNumeratorNonPositive: return "0 < abar+beta-n-gamma+1 violated";
    case Violation::MuNotBelowOne: return "abar+beta-n-gamma+1 < n+alpha-gamma violated";
  }
  return "unknown";
}

namespace exponents {

/// abar = sum_i 2/a_i; 0 for k = 0.
inline double abar(const GrowthParams& p) {
  if (p.k < 0 || p.a.size() != static_cast<std::size_t>(p.k))
    throw ParamDomainError("abar: a has wrong length for k");
  double s = 0.0;
  for (double ai : p.a) {
    if (ai < 1.0) throw ParamDomainError("abar: a_i < 1");
    s += 2.0 / ai;
  }
  return s;
}

/// Total validation: returns every violated admissibility condition.
/// Never throws; an empty list means the parameters are admissible.
inline std::vector<Violation> validate(const GrowthParams& p) {
  std::vector<Violation> out;
  const bool shape_ok = p.n >= 2 && p.k >= 0 && p.k <= p.n - 1 &&
                        p.a.size() == static_cast<std::size_t>(p.k) &&
                        p.eta.size() == static_cast<std::size_t>(p.k);
  if (!shape_ok) out.push_back(Violation::ShapeMismatch);
  for (double ai : p.a)
    if (ai < 1.0) {
      out.push_back(Violation::APowerBelowOne);
      break;
    }
  for (double ei : p.eta)
    if (ei <= 0.0) {
      out.push_back(Violation::EtaNonPositive);
      break;
    }
  if (p.A <= 0.0) out.push_back(Violation::ANonPositive);
  if (p.beta < p.n + 1.0) out.push_back(Violation::BetaTooSmall);
  if (shape_ok) {
    double ab = 0.0;
    bool a_ok = true;
    for (double ai : p.a) {
      if (ai < 1.0) a_ok = false;
      ab += 2.0 / ai;
    }
    if (a_ok) {
      const double num = ab + p.beta - p.n - p.gamma + 1.0;
      const double den = p.n + p.alpha - p.gamma;
      if (!(num > 0.0)) out.push_back(Violation::MuNumeratorNonPositive);
      if (!(num < den)) out.push_back(Violation::MuNotBelowOne);
    }
  }
  return out;
}

inline bool admissible(const GrowthParams& p) { return validate(p).empty(); }

inline void require_admissible(const GrowthParams& p, const char* who) {
  const auto v = validate(p);
  if (!v.empty()) {
    std::string msg = std::string(who) + ": inadmissible parameters:";
    for (auto violation : v) msg += " [" + to_string(violation) + "]";
    throw ParamDomainError(msg);
  }
}

/// Sharp boundary exponent mu = (abar + beta - n - gamma + 1)/(n + alpha - gamma).
/// Guaranteed in (0, 1) for admissible parameters.
inline double mu(const GrowthParams& p) {
  require_admissible(p, "mu");
  return (abar(p) + p.beta - p.n - p.gamma + 1.0) / (p.n + p.alpha - p.gamma);
}

/// Flat-boundary exponent mu0 = (beta - n - gamma + 1)/(n + alpha - gamma),
/// i.e. mu with every strictly convex direction removed (k treated as 0).
inline double mu_flat(const GrowthParams& p) {
  GrowthParams flat = p;
  flat.k = 0;
  flat.a.clear();
  flat.eta.clear();
  require_admissible(flat, "mu_flat");
  return (flat.beta - flat.n - flat.gamma + 1.0) / (flat.n + flat.alpha - flat.gamma);
}

/// Barrier shape powers b_i = (2/a_i) * (n+alpha-gamma)/(abar+1+beta-n-gamma).
/// Satisfies mu * a_i * b_i = 2 for every i.
inline std::vector<double> b_coeffs(const GrowthParams& p) {
  require_admissible(p, "b_coeffs");
  if (p.k == 0) throw ParamDomainError("b_coeffs: k = 0 has no b to compute");
  const double ab = abar(p);
  const double ratio = (p.n + p.alpha - p.gamma) / (ab + 1.0 + p.beta - p.n - p.gamma);
  std::vector<double> b(p.a.size());
  for (std::size_t i = 0; i < p.a.size(); ++i) b[i] = (2.0 / p.a[i]) * ratio;
  return b;
}

}  // namespace exponents
}  // namespace mab
