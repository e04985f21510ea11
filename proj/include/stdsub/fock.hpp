#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stdsub/modular.hpp"

namespace stdsub {

// Symmetric Fock space over C^d truncated at total particle number
// `cutoff`. Basis states are occupation multi-indices n with |n| <= cutoff,
// enumerated graded lexicographically (total degree ascending, then lex),
// so every low-particle sector is a prefix of the basis.
struct TruncatedFock {
  int d = 0;
  int cutoff = 0;
  double radius = 1.5;  // largest one-particle norm the space is rated for
  std::vector<std::vector<int>> basis;
  std::map<std::vector<int>, int> index;

  int dim() const { return static_cast<int>(basis.size()); }
  int grade(int b) const {
    int s = 0;
    for (int v : basis[b]) s += v;
    return s;
  }
  // Number of basis states with |n| <= max_particles (a prefix by grading).
  int sector_dim(int max_particles) const {
    int c = 0;
    for (int b = 0; b < dim(); ++b)
      if (grade(b) <= max_particles) ++c;
    return c;
  }
};

namespace detail {

inline void enumerate_occupations(int d, int remaining, std::vector<int>& cur,
                                  std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == d - 1) {
    cur.push_back(remaining);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur.push_back(v);
    enumerate_occupations(d, remaining - v, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline TruncatedFock fock_space(int d, int cutoff, double radius = 1.5) {
  if (d < 1) throw Error("DimensionMismatch", "fock: need d >= 1");
  if (cutoff < 0) throw Error("DimensionMismatch", "fock: need cutoff >= 0");
  if (!(radius > 0.0)) throw Error("RadiusExceeded", "fock: radius must be positive");
  TruncatedFock f;
  f.d = d;
  f.cutoff = cutoff;
  f.radius = radius;
  for (int k = 0; k <= cutoff; ++k) {
    std::vector<int> cur;
    detail::enumerate_occupations(d, k, cur, f.basis);
  }
  for (int b = 0; b < f.dim(); ++b) f.index[f.basis[b]] = b;
  return f;
}

// Norm-squared tail of the coherent series past the cutoff:
// tau(N, r) = sum_{n > N} r^{2n} / n!.
inline double tail_bound(int cutoff, double r) {
  double t = r * r;
  double term = 1.0;
  for (int n = 1; n <= cutoff + 1; ++n) term *= t / n;
  double sum = 0.0;
  int n = cutoff + 1;
  while (term > 0.0 && n < cutoff + 400) {
    sum += term;
    ++n;
    term *= t / n;
  }
  return sum;
}

// Every pass/fail tolerance is calibrated from the truncation tail and the
// floating point floor of dim-sized spectral computations; nothing is tuned
// per test.
inline double fock_tolerance(const TruncatedFock& f, double r) {
  double fp_floor =
      64.0 * std::numeric_limits<double>::epsilon() * f.dim();
  return std::max(tail_bound(f.cutoff, r), fp_floor);
}

struct FockVector {
  CVec coeffs;
  double tail = 0.0;  // norm-squared mass the truncation discarded
};

struct FockOperator {
  CMat m;
  std::optional<double> unitarity_defect;  // set when claimed unitary
  std::string warning;                     // set for expansive inputs
};

inline FockVector vacuum(const TruncatedFock& f) {
  FockVector v;
  v.coeffs = CVec::Zero(f.dim());
  v.coeffs(0) = 1.0;
  return v;
}

// Coherent vector e^f = sum_n f^{tensor n} / sqrt(n!): in the occupation
// basis the coefficient at n is prod_i f_i^{n_i} / sqrt(n_i!).
inline FockVector coherent(const CVec& h, const TruncatedFock& f) {
  if (h.size() != f.d)
    throw Error("DimensionMismatch", "coherent: one-particle size mismatch");
  if (h.norm() > f.radius + 1e-12)
    throw Error("RadiusExceeded",
                "coherent: vector norm " + std::to_string(h.norm()) +
                    " exceeds the rated radius " + std::to_string(f.radius));
  FockVector v;
  v.coeffs = CVec::Zero(f.dim());
  for (int b = 0; b < f.dim(); ++b) {
    Complex c = 1.0;
    for (int i = 0; i < f.d; ++i) {
      for (int rep = 1; rep <= f.basis[b][i]; ++rep)
        c *= h(i) / std::sqrt(static_cast<double>(rep));
    }
    v.coeffs(b) = c;
  }
  v.tail = tail_bound(f.cutoff, h.norm());
  return v;
}

// Creation operator, linear in h: adds one particle in direction h. The top
// grade is annihilated by the truncation, the sole source of CCR defects.
inline CMat creation(const CVec& h, const TruncatedFock& f) {
  if (h.size() != f.d)
    throw Error("DimensionMismatch", "creation: one-particle size mismatch");
  CMat a = CMat::Zero(f.dim(), f.dim());
  for (int b = 0; b < f.dim(); ++b) {
    if (f.grade(b) == f.cutoff) continue;
    for (int i = 0; i < f.d; ++i) {
      if (h(i) == Complex(0.0)) continue;
      std::vector<int> up = f.basis[b];
      up[i] += 1;
      a(f.index.at(up), b) += h(i) * std::sqrt(static_cast<double>(up[i]));
    }
  }
  return a;
}

// Annihilation, conjugate linear in h (inner product conjugates the first
// slot), so that a(h) e^g = <h, g> e^g before truncation.
inline CMat annihilation(const CVec& h, const TruncatedFock& f) {
  return creation(h, f).adjoint();
}

// Field operator Phi(h) = (a(h) + a*(h)) / sqrt(2); self-adjoint, and
// <e^0, Phi(h)^2 e^0> = |h|^2 / 2 pins the normalization.
inline CMat field(const CVec& h, const TruncatedFock& f) {
  CMat c = creation(h, f);
  return (c + CMat(c.adjoint())) / std::sqrt(2.0);
}

// Weyl operator W(h) = exp(i Phi(h)) through the Hermitian eigensystem of
// the truncated field; one construction for all uses, with the vacuum
// amplitude exp(-|h|^2/4) kept as a calibration test, not a definition.
inline FockOperator weyl(const CVec& h, const TruncatedFock& f) {
  if (h.size() != f.d)
    throw Error("DimensionMismatch", "weyl: one-particle size mismatch");
  if (h.norm() > f.radius + 1e-12)
    throw Error("RadiusExceeded",
                "weyl: vector norm " + std::to_string(h.norm()) +
                    " exceeds the rated radius " + std::to_string(f.radius));
  Eigen::SelfAdjointEigenSolver<CMat> eig(field(h, f));
  CVec phases(f.dim());
  for (int i = 0; i < f.dim(); ++i)
    phases(i) = std::exp(Complex(0.0, eig.eigenvalues()(i)));
  FockOperator w;
  w.m = eig.eigenvectors() * phases.asDiagonal() *
        eig.eigenvectors().adjoint();
  w.unitarity_defect =
      op_norm(CMat(w.m.adjoint() * w.m - CMat::Identity(f.dim(), f.dim())));
  return w;
}

// Defects are measured on low-particle inputs only: the top sectors carry
// the truncation damage by construction, so operators are compared through
// their action on states of at most cutoff/2 particles.
struct SectorDefect {
  double value = 0.0;
  int sector_max_particles = 0;
  int sector_dim = 0;
  double tolerance = 0.0;  // calibrated, never hand-tuned
};

// Calibrated bound on the low-sector mass a Weyl displacement of
// one-particle norm r can push past the cutoff. From the occupation
// amplitudes |<n+D| W |n>| <= e^{x/2} x^{D/2} sqrt(C(n+D, D) / D!) with
// x = r^2/2: per column the escaped mass is at most
// e^{x/2} sqrt(sum_{D > cutoff - sector} x^D C(sector+D, D) / D!), and the
// Frobenius estimate multiplies by the root of the sector dimension. This
// is the operator analog of the coherent norm tail and is the tolerance
// for every sector-restricted operator comparison.
inline double sector_crossing_bound(const TruncatedFock& f, int sector,
                                    double r) {
  double x = r * r / 2.0;
  int gap = f.cutoff - sector;
  double term = 1.0;
  for (int i = 1; i <= gap + 1; ++i)
    term *= x * (sector + i) / (static_cast<double>(i) * i);
  double t = 0.0;
  int delta = gap + 1;
  while (term > 0.0 && delta < f.cutoff + 400) {
    t += term;
    ++delta;
    term *= x * (sector + delta) / (static_cast<double>(delta) * delta);
  }
  return std::sqrt(t * f.sector_dim(sector)) * std::exp(x / 2.0);
}

inline double sector_tolerance(const TruncatedFock& f, double r) {
  double fp_floor =
      64.0 * std::numeric_limits<double>::epsilon() * f.dim();
  return std::max(sector_crossing_bound(f, f.cutoff / 2, r), fp_floor);
}

namespace detail {

inline double low_sector_norm(const CMat& x, const TruncatedFock& f,
                              int sector_dim) {
  return op_norm(CMat(x.leftCols(sector_dim)));
}

}  // namespace detail

// Weyl relation defect |W(h) W(k) - exp(-i/2 Im<h,k>) W(h+k)| on the low
// sector. Zero in exact arithmetic; truncation leaks in only through
// amplitudes that cross the cutoff.
inline SectorDefect ccr_defect(const CVec& h, const CVec& k,
                               const TruncatedFock& f) {
  if (h.norm() + k.norm() > f.radius + 1e-12)
    throw Error("RadiusExceeded",
                "ccr: |h| + |k| exceeds the rated radius");
  FockOperator wh = weyl(h, f);
  FockOperator wk = weyl(k, f);
  FockOperator whk = weyl(CVec(h + k), f);
  Complex phase = std::exp(Complex(0.0, -0.5 * h.dot(k).imag()));
  CMat x = wh.m * wk.m - phase * whk.m;
  SectorDefect out;
  out.sector_max_particles = f.cutoff / 2;
  out.sector_dim = f.sector_dim(out.sector_max_particles);
  out.value = detail::low_sector_norm(x, f, out.sector_dim);
  out.tolerance = sector_tolerance(f, h.norm() + k.norm());
  return out;
}

// |[W(h), W(k)]| on the low sector. For symplectically orthogonal h, k the
// exact commutator vanishes; for omega(h, k) != 0 its exact norm is
// 2 |sin(omega/2)|, which the control tests check against.
inline double commutator_norm(const CVec& h, const CVec& k,
                              const TruncatedFock& f) {
  FockOperator wh = weyl(h, f);
  FockOperator wk = weyl(k, f);
  CMat x = wh.m * wk.m - wk.m * wh.m;
  return detail::low_sector_norm(x, f, f.sector_dim(f.cutoff / 2));
}

// Second quantization Gamma(A) = blockwise A^{tensor n}. Columns are built
// by the creation recursion Gamma(A) a*(e_i) = a*(A e_i) Gamma(A) from the
// vacuum, which is exact at every grade up to the cutoff.
inline FockOperator gamma(const CMat& a, const TruncatedFock& f) {
  if (a.rows() != f.d || a.cols() != f.d)
    throw Error("DimensionMismatch", "gamma: operator size mismatch");
  FockOperator g;
  double nrm = op_norm(a);
  if (nrm > 1.0 + 1e-9)
    g.warning = "expansive one-particle operator (norm " +
                std::to_string(nrm) +
                "): top sectors are amplified, tail bounds scale like norm^"
                "(2 cutoff)";
  std::vector<CMat> lift;
  for (int i = 0; i < f.d; ++i)
    lift.push_back(creation(CVec(a.col(i)), f));
  g.m = CMat::Zero(f.dim(), f.dim());
  g.m(0, 0) = 1.0;
  for (int b = 1; b < f.dim(); ++b) {
    int i = 0;
    while (f.basis[b][i] == 0) ++i;
    std::vector<int> parent = f.basis[b];
    parent[i] -= 1;
    g.m.col(b) = lift[i] * g.m.col(f.index.at(parent)) /
                 std::sqrt(static_cast<double>(f.basis[b][i]));
  }
  return g;
}

// Max Weyl commutator over sampled pairs h in K, k in K'. The symplectic
// complement makes every exact commutator vanish, so the reported value is
// pure truncation and rounding error.
inline SectorDefect commutant_defect(const RealSubspace& kspace, int samples,
                                     const TruncatedFock& f, Rng& rng) {
  if (kspace.d != f.d)
    throw Error("DimensionMismatch",
                "commutant: subspace lives in a different one-particle space");
  if (samples < 1)
    throw Error("IndexOutOfRange", "commutant: need at least one sample");
  RealSubspace prime = symplectic_complement(kspace);
  SectorDefect out;
  out.sector_max_particles = f.cutoff / 2;
  out.sector_dim = f.sector_dim(out.sector_max_particles);
  double rho = 0.45 * f.radius;
  out.tolerance = sector_tolerance(f, 2.0 * rho);
  for (int s = 0; s < samples; ++s) {
    Vec hx = kspace.frame * rng.gauss_mat(kspace.dim(), 1);
    Vec kx = prime.frame * rng.gauss_mat(prime.dim(), 1);
    if (hx.norm() == 0.0 || kx.norm() == 0.0) continue;
    CVec h = complexify_vec(Vec(hx * (rho / hx.norm())));
    CVec k = complexify_vec(Vec(kx * (rho / kx.norm())));
    out.value = std::max(out.value, commutator_norm(h, k, f));
  }
  return out;
}

}  // namespace stdsub
