#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "stdsub/subspace.hpp"

namespace stdsub {

enum class Linearity { ComplexLinear, ConjugateLinear, Neither };

inline Linearity classify_linearity(int d, const Mat& a, double tol = 1e-9) {
  Mat jc = ComplexSpace{d}.mult_i();
  double scale = std::max(1.0, op_norm(a));
  double comm = op_norm(a * jc - jc * a);
  double anti = op_norm(a * jc + jc * a);
  if (comm <= tol * scale) return Linearity::ComplexLinear;
  if (anti <= tol * scale) return Linearity::ConjugateLinear;
  return Linearity::Neither;
}

struct RealOperator {
  int d = 0;
  Mat m;
  Linearity tag = Linearity::Neither;
};

// Residuals of the defining identities, recorded for the check layer.
struct ModularResiduals {
  double s_fixes_k = 0.0;       // ||sF - F|| on the frame of K
  double s_involution = 0.0;    // ||s^2 - I||
  double j_involution = 0.0;    // ||j^2 - I||
  double j_orthogonal = 0.0;    // ||j^T j - I||
  double reconstruction = 0.0;  // ||s - j delta^{1/2}||
  double jdj_inversion = 0.0;   // ||j delta j - delta^{-1}||
  double max() const {
    return std::max({s_fixes_k, s_involution, j_involution, j_orthogonal,
                     reconstruction, jdj_inversion});
  }
};

// Modular data of a standard subspace: s(h + i k) = h - i k on K + iK with
// polar decomposition s = j delta^{1/2}. delta is complex-linear positive;
// the complex spectrum (one entry per complex dimension) is kept ascending
// together with the complex eigenvectors.
struct ModularData {
  int d = 0;
  RealSubspace k;
  Mat s, j, delta;
  Vec delta_spectrum;  // d entries, ascending
  CMat delta_eigenvectors;
  ModularResiduals residuals;
};

inline Mat realify_function_of_delta(const ModularData& md,
                                     const std::function<Complex(double)>& f) {
  CVec vals(md.d);
  for (int i = 0; i < md.d; ++i) vals(i) = f(md.delta_spectrum(i));
  CMat m = md.delta_eigenvectors * vals.asDiagonal() *
           md.delta_eigenvectors.adjoint();
  return realify(m);
}

inline Mat delta_power(const ModularData& md, double p) {
  return realify_function_of_delta(
      md, [p](double l) { return Complex(std::pow(l, p), 0.0); });
}

inline Mat delta_it(const ModularData& md, double t) {
  return realify_function_of_delta(md, [t](double l) {
    return std::exp(Complex(0.0, t * std::log(l)));
  });
}

inline ModularData tomita(const RealSubspace& k, const Tolerances& tol = {}) {
  SubspaceClass cls = classify_subspace(k, tol);
  if (!cls.is_standard)
    throw Error("NotStandard",
                "tomita: K ^ iK = 0 and K + iK dense required (dim_R of a "
                "standard subspace must equal the complex dimension)");
  ModularData md;
  md.d = k.d;
  md.k = k;
  const Mat jc = k.space().mult_i();
  const int n = 2 * k.d;
  Mat basis(n, n), target(n, n);
  basis << k.frame, jc * k.frame;
  target << k.frame, -jc * k.frame;
  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(n - 1) <= 1e-12 * sv(0))
    throw Error("NotStandard", "tomita: K + iK numerically degenerate");
  md.s = target * svd.solve(Mat::Identity(n, n));
  md.delta = md.s.transpose() * md.s;
  CMat dc = complexify(md.delta, 1e-8);
  Eigen::SelfAdjointEigenSolver<CMat> eig(dc);
  md.delta_spectrum = eig.eigenvalues();
  md.delta_eigenvectors = eig.eigenvectors();
  Mat dinvhalf = realify_function_of_delta(
      md, [](double l) { return Complex(1.0 / std::sqrt(l), 0.0); });
  md.j = md.s * dinvhalf;
  Mat dhalf = realify_function_of_delta(
      md, [](double l) { return Complex(std::sqrt(l), 0.0); });
  Mat id = Mat::Identity(n, n);
  md.residuals.s_fixes_k = op_norm(Mat(md.s * k.frame - k.frame));
  md.residuals.s_involution = op_norm(Mat(md.s * md.s - id));
  md.residuals.j_involution = op_norm(Mat(md.j * md.j - id));
  md.residuals.j_orthogonal = op_norm(Mat(md.j.transpose() * md.j - id));
  md.residuals.reconstruction = op_norm(Mat(md.s - md.j * dhalf));
  Mat dinv = realify_function_of_delta(
      md, [](double l) { return Complex(1.0 / l, 0.0); });
  md.residuals.jdj_inversion = op_norm(Mat(md.j * md.delta * md.j - dinv));
  return md;
}

// Pair operator s_{E,F}(e + f) = e - f for a standard pair spanning the
// whole space. Generally only real-linear.
inline RealOperator tomita_pair(const RealSubspace& e, const RealSubspace& f,
                                const Tolerances& tol = {}) {
  if (e.d != f.d) throw Error("DimensionMismatch", "tomita_pair");
  PairClass pc = classify_pair(e, f, tol);
  if (!pc.is_standard_pair || e.dim() + f.dim() != 2 * e.d)
    throw Error("NotStandardPair",
                "tomita_pair: need E ^ F = 0 and E + F dense");
  const int n = 2 * e.d;
  Mat basis(n, n), target(n, n);
  basis << e.frame, f.frame;
  target << e.frame, -f.frame;
  Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues()(n - 1) <= 1e-12 * svd.singularValues()(0))
    throw Error("NotStandardPair", "tomita_pair: E + F numerically degenerate");
  Mat s = target * svd.solve(Mat::Identity(n, n));
  return {e.d, s, classify_linearity(e.d, s)};
}

struct PolarDecomposition {
  Mat u;    // orthogonal part
  Mat pos;  // positive symmetric part, a = u * pos
};

inline PolarDecomposition polar(const Mat& a, double cond_tol = 1e-12) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= cond_tol * sv(0))
    throw Error("RankDeficient", "polar: operator numerically singular");
  PolarDecomposition p;
  p.u = svd.matrixU() * svd.matrixV().transpose();
  p.pos = svd.matrixV() * sv.asDiagonal() * svd.matrixV().transpose();
  return p;
}

inline RealSubspace kernel_j_plus_i(const RealOperator& j,
                                    const Tolerances& tol = {}) {
  Mat m = j.m + Mat::Identity(j.m.rows(), j.m.cols());
  return {j.d, null_space_basis(m, tol.rank_rel)};
}

inline RealSubspace kernel_j_plus_i(const ModularData& md,
                                    const Tolerances& tol = {}) {
  return kernel_j_plus_i(RealOperator{md.d, md.j, Linearity::ConjugateLinear},
                         tol);
}

struct SpectralFlags {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double dist_to_one = 0.0;
  bool inversion_symmetric = false;  // sorted spectrum matches sorted inverses
};

inline SpectralFlags spectral_flags(const ModularData& md,
                                    double sym_tol = 1e-9) {
  SpectralFlags f;
  f.lambda_min = md.delta_spectrum(0);
  f.lambda_max = md.delta_spectrum(md.d - 1);
  f.dist_to_one = 1e300;
  std::vector<double> inv;
  for (int i = 0; i < md.d; ++i) {
    f.dist_to_one = std::min(f.dist_to_one,
                             std::abs(md.delta_spectrum(i) - 1.0));
    inv.push_back(1.0 / md.delta_spectrum(i));
  }
  std::sort(inv.begin(), inv.end());
  double worst = 0.0;
  for (int i = 0; i < md.d; ++i)
    worst = std::max(worst, std::abs(inv[i] - md.delta_spectrum(i)) /
                                std::max(1.0, md.delta_spectrum(i)));
  f.inversion_symmetric = worst <= sym_tol;
  return f;
}

struct AngleData {
  Mat theta;     // realified self-adjoint operator with spectrum in [0, pi/2]
  Vec spectrum;  // ascending
};

// cos Theta = |delta - I| (delta + I)^{-1}, evaluated on the spectrum.
inline AngleData angle_operator(const ModularData& md) {
  AngleData a;
  a.theta = realify_function_of_delta(md, [](double l) {
    double c = std::abs(l - 1.0) / (l + 1.0);
    return Complex(std::acos(std::min(1.0, c)), 0.0);
  });
  std::vector<double> sp;
  for (int i = 0; i < md.d; ++i) {
    double c = std::abs(md.delta_spectrum(i) - 1.0) / (md.delta_spectrum(i) + 1.0);
    sp.push_back(std::acos(std::min(1.0, c)));
  }
  std::sort(sp.begin(), sp.end());
  a.spectrum = Eigen::Map<Vec>(sp.data(), sp.size());
  return a;
}

// sin Theta = |dd - I| (dd + I)^{-1} where s_{E,F} = u dd^{1/2} is the polar
// decomposition of the pair operator (dd = s^T s). Spectrum listed over the
// real eigendecomposition (2d entries).
inline AngleData angle_from_pair(const RealSubspace& e, const RealSubspace& f,
                                 const Tolerances& tol = {}) {
  RealOperator s = tomita_pair(e, f, tol);
  Mat dd = s.m.transpose() * s.m;
  Eigen::SelfAdjointEigenSolver<Mat> eig(dd);
  Vec vals = eig.eigenvalues();
  Vec th(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    double sv = std::abs(vals(i) - 1.0) / (vals(i) + 1.0);
    th(i) = std::asin(std::min(1.0, sv));
  }
  AngleData a;
  a.theta = eig.eigenvectors() * th.asDiagonal() * eig.eigenvectors().transpose();
  std::sort(th.data(), th.data() + th.size());
  a.spectrum = th;
  return a;
}

// Real span of the delta eigenvectors whose angle lies in [lo, hi].
inline RealSubspace spectral_projection_theta(const ModularData& md, double lo,
                                              double hi,
                                              const Tolerances& tol = {}) {
  std::vector<int> idx;
  for (int i = 0; i < md.d; ++i) {
    double c = std::abs(md.delta_spectrum(i) - 1.0) / (md.delta_spectrum(i) + 1.0);
    double th = std::acos(std::min(1.0, c));
    if (th >= lo - 1e-12 && th <= hi + 1e-12) idx.push_back(i);
  }
  if (idx.empty()) return RealSubspace::zero(md.d);
  Mat frame(2 * md.d, 2 * idx.size());
  for (size_t c = 0; c < idx.size(); ++c) {
    CVec v = md.delta_eigenvectors.col(idx[c]);
    frame.col(2 * c) = realify_vec(v);
    frame.col(2 * c + 1) = realify_vec(CVec(Complex(0, 1) * v));
  }
  return {md.d, orthonormal_basis(frame, tol.rank_rel)};
}

namespace detail {

inline double golden_max(const std::function<double(double)>& f, double lo,
                         double hi, int iters = 80) {
  const double gr = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    }
  }
  return std::max(f(a), f(b));
}

// Largest |g(h, k)| over unit h in the row space, unit k in the column
// space of the block pairing matrix. The maximization over k is closed
// form; the remaining angle is refined by golden section.
inline double block_pairing_sup(const Mat& g) {
  if (g.rows() == 0 || g.cols() == 0) return 0.0;
  if (g.rows() == 1) return g.row(0).norm();
  if (g.rows() > 2) return op_norm(g);  // generic fallback, recorded by caller
  auto f = [&g](double alpha) {
    Eigen::Vector2d u(std::cos(alpha), std::sin(alpha));
    return (g.transpose() * u).norm();
  };
  const int grid = 64;
  double best = 0.0, best_x = 0.0;
  for (int i = 0; i < grid; ++i) {
    double x = 3.141592653589793 * i / grid;
    double v = f(x);
    if (v > best) { best = v; best_x = x; }
  }
  double h = 3.141592653589793 / grid;
  return golden_max(f, best_x - h, best_x + h);
}

}  // namespace detail

struct KernelPairingReport {
  double sup_re_pairing = 0.0;  // sup |Re<h,k>|, unit h in K, k in Ker(j+I)
  double min_graph_ratio = 0.0; // min ||h+k||^2 / (||h||^2 + ||k||^2)
  int blocks = 0;
  std::vector<double> block_sup;
  std::string method;  // "two-angle" or "svd-fallback"
};

// Both K and Ker(j+I) are reduced by the spectral blocks of |log delta|;
// the sup is the maximum over blocks of the two-angle fiber maximization.
inline KernelPairingReport kernel_pairing_report(const ModularData& md,
                                                 const Tolerances& tol = {}) {
  RealSubspace ker = kernel_j_plus_i(md, tol);
  std::vector<std::vector<int>> groups;
  std::vector<double> levels;
  for (int i = 0; i < md.d; ++i) {
    double l = std::abs(std::log(md.delta_spectrum(i)));
    bool placed = false;
    for (size_t gidx = 0; gidx < groups.size(); ++gidx)
      if (std::abs(levels[gidx] - l) <= 1e-9 * (1.0 + l)) {
        groups[gidx].push_back(i);
        placed = true;
        break;
      }
    if (!placed) {
      groups.push_back({i});
      levels.push_back(l);
    }
  }
  KernelPairingReport rep;
  rep.blocks = static_cast<int>(groups.size());
  rep.method = "two-angle";
  for (const auto& grp : groups) {
    Mat p = Mat::Zero(2 * md.d, 2 * md.d);
    for (int i : grp) {
      CVec v = md.delta_eigenvectors.col(i);
      p += realify(CMat(v * v.adjoint()));
    }
    Mat kf = orthonormal_basis(p * md.k.frame, tol.rank_rel);
    Mat ef = orthonormal_basis(p * ker.frame, tol.rank_rel);
    Mat g = kf.transpose() * ef;
    if (g.rows() > 2) rep.method = "svd-fallback";
    rep.block_sup.push_back(detail::block_pairing_sup(g));
  }
  rep.sup_re_pairing = 0.0;
  for (double v : rep.block_sup) rep.sup_re_pairing = std::max(rep.sup_re_pairing, v);
  rep.min_graph_ratio = 1.0 - rep.sup_re_pairing;
  return rep;
}

}  // namespace stdsub
