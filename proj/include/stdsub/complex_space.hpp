#pragma once

#include "stdsub/linalg.hpp"

namespace stdsub {

// C^d realified as R^{2d} with interleaved coordinates
// (Re z_1, Im z_1, ..., Re z_d, Im z_d). Multiplication by i is the
// block-diagonal rotation Jc; the Euclidean product g is Re<.,.> and
// omega(x,y) = g(Jc x, y) = Im<x,y> (inner product conjugate-linear in
// the first slot).
struct ComplexSpace {
  int d = 0;

  int real_dim() const { return 2 * d; }

  Mat mult_i() const {
    Mat j = Mat::Zero(2 * d, 2 * d);
    for (int k = 0; k < d; ++k) {
      j(2 * k, 2 * k + 1) = -1.0;
      j(2 * k + 1, 2 * k) = 1.0;
    }
    return j;
  }

  // Componentwise complex conjugation as a real operator.
  Mat conjugation() const {
    Mat c = Mat::Identity(2 * d, 2 * d);
    for (int k = 0; k < d; ++k) c(2 * k + 1, 2 * k + 1) = -1.0;
    return c;
  }
};

inline Vec realify_vec(const CVec& z) {
  Vec x(2 * z.size());
  for (int k = 0; k < z.size(); ++k) {
    x(2 * k) = z(k).real();
    x(2 * k + 1) = z(k).imag();
  }
  return x;
}

inline CVec complexify_vec(const Vec& x) {
  CVec z(x.size() / 2);
  for (int k = 0; k < z.size(); ++k) z(k) = Complex(x(2 * k), x(2 * k + 1));
  return z;
}

// a + ib acting on C^m -> C^n becomes 2x2 blocks [[a, -b], [b, a]].
inline Mat realify(const CMat& m) {
  Mat r(2 * m.rows(), 2 * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double a = m(i, j).real(), b = m(i, j).imag();
      r(2 * i, 2 * j) = a;
      r(2 * i, 2 * j + 1) = -b;
      r(2 * i + 1, 2 * j) = b;
      r(2 * i + 1, 2 * j + 1) = a;
    }
  return r;
}

// Inverse of realify; requires commutation with Jc (complex linearity).
inline CMat complexify(const Mat& r, double tol = 1e-9) {
  if (r.rows() % 2 != 0 || r.cols() % 2 != 0)
    throw Error("NotComplexLinear", "odd real dimensions");
  CMat m(r.rows() / 2, r.cols() / 2);
  double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double a = r(2 * i, 2 * j), b = r(2 * i + 1, 2 * j);
      if (std::abs(r(2 * i + 1, 2 * j + 1) - a) > tol * scale ||
          std::abs(r(2 * i, 2 * j + 1) + b) > tol * scale)
        throw Error("NotComplexLinear", "matrix does not commute with i");
      m(i, j) = Complex(a, b);
    }
  return m;
}

inline Complex herm_inner(const Vec& x, const Vec& y) {
  CVec zx = complexify_vec(x), zy = complexify_vec(y);
  return zx.dot(zy);  // Eigen's dot conjugates the first argument
}

inline double omega(const ComplexSpace& sp, const Vec& x, const Vec& y) {
  return (sp.mult_i() * x).dot(y);
}

}  // namespace stdsub
