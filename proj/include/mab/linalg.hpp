#pragma once

// Small dense vector/matrix helpers sized for desk-scale dimensions
// (n <= 5 everywhere in this library). Row-major storage, no expression
// templates, no external dependencies.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace mab {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  assert(a.size() == b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec operator-(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

inline Vec operator*(double s, Vec a) {
  for (double& x : a) x *= s;
  return a;
}

class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Mat identity(std::size_t n) {
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Vec apply(const Vec& x) const {
    assert(x.size() == cols_);
    Vec y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
    return y;
  }

  Vec apply_transpose(const Vec& x) const {
    assert(x.size() == rows_);
    Vec y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) y[j] += (*this)(i, j) * x[i];
    return y;
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

inline Mat operator*(const Mat& a, const Mat& b) {
  assert(a.cols() == b.rows());
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

/// Determinant by LU with partial pivoting.
inline double det(Mat m) {
  assert(m.rows() == m.cols());
  const std::size_t n = m.rows();
  double d = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      d = -d;
    }
    d *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return d;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order.
inline Vec sym_eigenvalues(Mat a, int max_sweeps = 64) {
  assert(a.rows() == a.cols());
  const std::size_t n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  Vec ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

/// pow with an exact-multiplication fast path for integral exponents.
inline double pow_real(double base, double expo) {
  const double r = std::nearbyint(expo);
  if (r == expo && std::abs(r) <= 64.0) {
    long e = static_cast<long>(r);
    const bool inv = e < 0;
    if (inv) e = -e;
    double acc = 1.0, b = base;
    while (e > 0) {
      if (e & 1) acc *= b;
      b *= b;
      e >>= 1;
    }
    return inv ? 1.0 / acc : acc;
  }
  return std::pow(base, expo);
}

}  // namespace mab
