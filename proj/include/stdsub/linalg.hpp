#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace stdsub {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

// Error with a stable machine-readable code; the CLI maps codes to exit status.
struct Error : std::runtime_error {
  std::string code;
  Error(std::string c, const std::string& what)
      : std::runtime_error(c + ": " + what), code(std::move(c)) {}
};

// Pinned default tolerances. rank_rel is relative to the largest singular
// value; subspace_eq is an operator-norm bound on projector differences;
// op_identity bounds operator reconstruction residuals.
struct Tolerances {
  double rank_rel = 1e-10;
  double subspace_eq = 1e-9;
  double op_identity = 1e-8;
};

template <typename Derived>
double op_norm(const Eigen::MatrixBase<Derived>& expr) {
  using Scalar = typename Derived::Scalar;
  using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Dense a = expr;
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  if (a.rows() >= 3 && a.cols() >= 3 && std::max(a.rows(), a.cols()) > 64)
    return Eigen::BDCSVD<Dense>(a).singularValues()(0);
  return Eigen::JacobiSVD<Dense>(a).singularValues()(0);
}

inline int rank_of(const Mat& a, double rank_rel) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& sv = svd.singularValues();
  if (sv(0) <= 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rank_rel * sv(0)) ++r;
  return r;
}

// Deterministic orthonormal basis of the column space: column-pivoted
// Householder QR, rank cut at rank_rel relative to the leading diagonal.
inline Mat orthonormal_basis(const Mat& a, double rank_rel) {
  if (a.cols() == 0) return Mat(a.rows(), 0);
  Eigen::ColPivHouseholderQR<Mat> qr(a);
  Mat r = qr.matrixR().topLeftCorner(std::min(a.rows(), a.cols()),
                                     std::min(a.rows(), a.cols()));
  double lead = std::abs(r(0, 0));
  if (lead <= 0.0) return Mat(a.rows(), 0);
  int rank = 0;
  for (int i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i)) > rank_rel * lead) ++rank;
  Mat q = qr.householderQ();
  return q.leftCols(rank);
}

// Complex counterpart of orthonormal_basis, same pivoting and rank cut.
// Column phases are pinned (largest-modulus entry real positive) so the
// frame is a canonical function of the input span, not of QR internals.
inline CMat complex_orthonormal_basis(const CMat& a, double rank_rel) {
  if (a.cols() == 0) return CMat(a.rows(), 0);
  Eigen::ColPivHouseholderQR<CMat> qr(a);
  CMat r = qr.matrixR().topLeftCorner(std::min(a.rows(), a.cols()),
                                      std::min(a.rows(), a.cols()));
  double lead = std::abs(r(0, 0));
  if (lead <= 0.0) return CMat(a.rows(), 0);
  int rank = 0;
  for (int i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i)) > rank_rel * lead) ++rank;
  CMat q = qr.householderQ();
  CMat basis = q.leftCols(rank);
  for (int j = 0; j < basis.cols(); ++j) {
    int at = 0;
    basis.col(j).cwiseAbs().maxCoeff(&at);
    Complex z = basis(at, j);
    if (std::abs(z) > 0.0) basis.col(j) *= std::conj(z) / std::abs(z);
  }
  return basis;
}

// Unitary complement of a complex orthonormal frame.
inline CMat complex_complement_basis(const CMat& frame, int ambient) {
  if (frame.cols() == 0) return CMat(CMat::Identity(ambient, ambient));
  Eigen::HouseholderQR<CMat> qr(frame);
  CMat q = qr.householderQ();
  return q.rightCols(ambient - frame.cols());
}

// Orthonormal basis of the g-orthogonal complement of an orthonormal frame.
inline Mat orthogonal_complement_basis(const Mat& frame, int ambient) {
  if (frame.cols() == 0) return Mat::Identity(ambient, ambient);
  Eigen::HouseholderQR<Mat> qr(frame);
  Mat q = qr.householderQ();
  return q.rightCols(ambient - frame.cols());
}

inline Mat null_space_basis(const Mat& a, double rank_rel) {
  if (a.cols() == 0) return Mat(0, 0);
  if (a.rows() == 0) return Mat::Identity(a.cols(), a.cols());
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  if (sv(0) > 0.0)
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > rank_rel * sv(0)) ++rank;
  return svd.matrixV().rightCols(a.cols() - rank);
}

// Deterministic RNG. Box-Muller on top of mt19937_64 so streams do not
// depend on the standard library's distribution implementations.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}

  double uniform01() {
    return (eng() >> 11) * (1.0 / 9007199254740992.0);
  }
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }
  double gauss() {
    double u1 = 0.0;
    do { u1 = uniform01(); } while (u1 <= 1e-300);
    double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
  Mat gauss_mat(int rows, int cols) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gauss();
    return m;
  }
  std::uint64_t integer(std::uint64_t n) { return eng() % n; }
};

}  // namespace stdsub
