#pragma once

// Exact reference solutions of det D^2 u = |u|^{-(n+2)}, u = 0 on the
// boundary, on the unit ball, the half-infinite cylinder and the cone,
// plus generic central finite-difference gradient/Hessian oracles used to
// validate every closed form in the library.

#include <cmath>
#include <functional>

#include "mab/errors.hpp"
#include "mab/linalg.hpp"

namespace mab {
namespace oracle {

/// u(x) = -sqrt(1 - |x|^2) on the unit ball.
inline double exact_ball(const Vec& x) {
  const double r2 = dot(x, x);
  if (r2 >= 1.0) throw DomainError("exact_ball: |x| >= 1");
  return -std::sqrt(1.0 - r2);
}

inline Vec exact_ball_gradient(const Vec& x) {
  const double u = exact_ball(x);
  Vec g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i] / (-u);
  return g;
}

inline Mat exact_ball_hessian(const Vec& x) {
  const double au = -exact_ball(x);  // sqrt(1-r^2)
  const std::size_t n = x.size();
  Mat h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = (i == j ? 1.0 / au : 0.0) + x[i] * x[j] / (au * au * au);
  return h;
}

/// u(x) = -(n+1)^{1/2} n^{-n/(2(n+1))} x_n^{1/(n+1)} (1-|x'|^2)^{n/(2(n+1))}
/// on the cylinder |x'| < 1, x_n > 0.
inline double exact_cylinder(const Vec& x) {
  const int n = static_cast<int>(x.size());
  double rp2 = 0.0;
  for (int i = 0; i + 1 < n; ++i) rp2 += x[i] * x[i];
  const double xn = x[n - 1];
  if (rp2 >= 1.0 || xn <= 0.0) throw DomainError("exact_cylinder: point outside cylinder");
  const double nn = static_cast<double>(n);
  const double coeff = std::sqrt(nn + 1.0) * std::pow(nn, -nn / (2.0 * (nn + 1.0)));
  return -coeff * std::pow(xn, 1.0 / (nn + 1.0)) *
         std::pow(1.0 - rp2, nn / (2.0 * (nn + 1.0)));
}

/// Aperture constant of the cone domain {x_n >= cone_slope(n) |x'|}.
inline double cone_slope(int n) {
  const double nn = n;
  return std::sqrt(std::pow(nn, nn) / std::pow(nn + 1.0, nn + 1.0));
}

/// u(x) = -[ (n+1)^{n+1}/n^n x_n^2 - |x'|^2 ]^{n/(2(n+1))} inside the cone.
inline double exact_cone(const Vec& x) {
  const int n = static_cast<int>(x.size());
  double rp2 = 0.0;
  for (int i = 0; i + 1 < n; ++i) rp2 += x[i] * x[i];
  const double xn = x[n - 1];
  const double nn = static_cast<double>(n);
  const double c = std::pow(nn + 1.0, nn + 1.0) / std::pow(nn, nn);
  const double bracket = c * xn * xn - rp2;
  if (xn <= 0.0 || bracket <= 0.0) throw DomainError("exact_cone: point outside cone");
  return -std::pow(bracket, nn / (2.0 * (nn + 1.0)));
}

using ScalarField = std::function<double(const Vec&)>;

/// Central first differences, O(h^2).
inline Vec fd_gradient(const ScalarField& f, const Vec& x, double h) {
  Vec g(x.size());
  Vec xp = x, xm = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

/// Central second differences, O(h^2).
inline Mat fd_hessian(const ScalarField& f, const Vec& x, double h) {
  const std::size_t n = x.size();
  Mat hess(n, n);
  const double f0 = f(x);
  Vec p = x;
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = x[i] + h;
    const double fp = f(p);
    p[i] = x[i] - h;
    const double fm = f(p);
    p[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      p[i] = x[i] + h; p[j] = x[j] + h; const double fpp = f(p);
      p[j] = x[j] - h; const double fpm = f(p);
      p[i] = x[i] - h; const double fmm = f(p);
      p[j] = x[j] + h; const double fmp = f(p);
      p[i] = x[i]; p[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  return hess;
}

/// Richardson-extrapolated Hessian, O(h^4); the workhorse near boundaries
/// where a single step cannot balance truncation against roundoff.
inline Mat fd_hessian_richardson(const ScalarField& f, const Vec& x, double h) {
  const Mat ch = fd_hessian(f, x, h);
  const Mat ch2 = fd_hessian(f, x, 0.5 * h);
  Mat out(ch.rows(), ch.cols());
  for (std::size_t i = 0; i < ch.rows(); ++i)
    for (std::size_t j = 0; j < ch.cols(); ++j)
      out(i, j) = (4.0 * ch2(i, j) - ch(i, j)) / 3.0;
  return out;
}

/// |det D^2 u| * |u|^{n+2} - 1 with the FD Hessian; the residual of the
/// hyperbolic equation at x.
inline double hyperbolic_residual_fd(const ScalarField& f, const Vec& x, double h) {
  const double u = f(x);
  const Mat hess = fd_hessian_richardson(f, x, h);
  const double n2 = static_cast<double>(x.size()) + 2.0;
  return det(hess) * pow_real(std::abs(u), n2) - 1.0;
}

}  // namespace oracle
}  // namespace mab
