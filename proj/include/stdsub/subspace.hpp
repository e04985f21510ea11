#pragma once

#include <utility>
#include <vector>

#include "stdsub/complex_space.hpp"

namespace stdsub {

// Closed real-linear subspace of the realified C^d, stored as a frame of
// g-orthonormal columns. Value type; all lattice operations are pure.
struct RealSubspace {
  int d = 0;
  Mat frame;  // 2d x r, orthonormal columns

  int dim() const { return static_cast<int>(frame.cols()); }
  int ambient_real_dim() const { return 2 * d; }
  Mat projector() const {
    if (dim() == 0) return Mat::Zero(2 * d, 2 * d);
    return frame * frame.transpose();
  }
  ComplexSpace space() const { return ComplexSpace{d}; }

  static RealSubspace zero(int d) { return {d, Mat(2 * d, 0)}; }
  static RealSubspace full(int d) { return {d, Mat::Identity(2 * d, 2 * d)}; }
};

inline RealSubspace span(int d, const Mat& vectors,
                         const Tolerances& tol = {}) {
  if (vectors.rows() != 2 * d)
    throw Error("DimensionMismatch", "span: vectors must have 2d rows");
  return {d, orthonormal_basis(vectors, tol.rank_rel)};
}

inline double subspace_distance(const RealSubspace& e, const RealSubspace& f) {
  if (e.d != f.d) throw Error("DimensionMismatch", "distance: ambient differs");
  return op_norm(e.projector() - f.projector());
}

inline bool subspace_equal(const RealSubspace& e, const RealSubspace& f,
                           double tol) {
  return subspace_distance(e, f) <= tol;
}

// Largest deviation of inner's frame from lying inside outer.
inline double containment_defect(const RealSubspace& outer,
                                 const RealSubspace& inner) {
  if (inner.dim() == 0) return 0.0;
  return op_norm(inner.frame - outer.projector() * inner.frame);
}

inline bool subspace_contains(const RealSubspace& outer,
                              const RealSubspace& inner, double tol) {
  return containment_defect(outer, inner) <= tol;
}

inline bool subspace_contains_vector(const RealSubspace& e, const Vec& x,
                                     double tol) {
  double n = x.norm();
  if (n == 0.0) return true;
  return (x - e.projector() * x).norm() <= tol * n;
}

inline RealSubspace join(const RealSubspace& e, const RealSubspace& f,
                         const Tolerances& tol = {}) {
  if (e.d != f.d) throw Error("DimensionMismatch", "join: ambient differs");
  Mat cat(2 * e.d, e.dim() + f.dim());
  cat << e.frame, f.frame;
  return {e.d, orthonormal_basis(cat, tol.rank_rel)};
}

// Intersection by principal angles: directions of the frame product with
// singular value within rank_rel of 1 are common directions.
inline RealSubspace meet(const RealSubspace& e, const RealSubspace& f,
                         const Tolerances& tol = {}) {
  if (e.d != f.d) throw Error("DimensionMismatch", "meet: ambient differs");
  if (e.dim() == 0 || f.dim() == 0) return RealSubspace::zero(e.d);
  Mat g = e.frame.transpose() * f.frame;
  Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int count = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) >= 1.0 - tol.rank_rel) ++count;
  if (count == 0) return RealSubspace::zero(e.d);
  Mat common = e.frame * svd.matrixU().leftCols(count);
  return {e.d, orthonormal_basis(common, tol.rank_rel)};
}

inline RealSubspace mult_i(const RealSubspace& e) {
  return {e.d, e.space().mult_i() * e.frame};
}

// Symplectic complement K' = {y : omega(x, y) = 0 for all x in K},
// computed as Jc applied to the g-orthogonal complement.
inline RealSubspace symplectic_complement(const RealSubspace& e) {
  Mat orth = orthogonal_complement_basis(e.frame, 2 * e.d);
  return {e.d, e.space().mult_i() * orth};
}

struct SubspaceClass {
  int dim = 0;
  int dim_meet_i = 0;           // dim(K ^ iK)
  int codim_join_i = 0;         // codim(K v iK)
  int dim_meet_commutant = 0;   // dim(K ^ K')
  int codim_join_commutant = 0; // codim(K v K')
  bool is_standard = false;     // K ^ iK = 0 and K v iK dense
  bool is_factor = false;       // K ^ K' = 0 and K v K' dense
};

inline SubspaceClass classify_subspace(const RealSubspace& k,
                                       const Tolerances& tol = {}) {
  SubspaceClass c;
  c.dim = k.dim();
  RealSubspace ik = mult_i(k);
  c.dim_meet_i = meet(k, ik, tol).dim();
  c.codim_join_i = 2 * k.d - join(k, ik, tol).dim();
  RealSubspace kp = symplectic_complement(k);
  c.dim_meet_commutant = meet(k, kp, tol).dim();
  c.codim_join_commutant = 2 * k.d - join(k, kp, tol).dim();
  c.is_standard = (c.dim_meet_i == 0 && c.codim_join_i == 0);
  c.is_factor = (c.dim_meet_commutant == 0 && c.codim_join_commutant == 0);
  return c;
}

struct PairClass {
  int dim_meet = 0;
  int codim_join = 0;
  bool is_standard_pair = false;  // E ^ F = 0 and E v F dense
};

inline PairClass classify_pair(const RealSubspace& e, const RealSubspace& f,
                               const Tolerances& tol = {}) {
  PairClass c;
  c.dim_meet = meet(e, f, tol).dim();
  c.codim_join = 2 * e.d - join(e, f, tol).dim();
  c.is_standard_pair = (c.dim_meet == 0 && c.codim_join == 0);
  return c;
}

struct CanonicalParts {
  RealSubspace complex_part;  // M ^ iM, an i-invariant subspace
  RealSubspace residual;      // orthocomplement of the complex part inside M
};

inline CanonicalParts canonical_parts(const RealSubspace& m,
                                      const Tolerances& tol = {}) {
  CanonicalParts p;
  p.complex_part = meet(m, mult_i(m), tol);
  if (p.complex_part.dim() == 0) {
    p.residual = m;
    return p;
  }
  Mat res = m.frame - p.complex_part.projector() * m.frame;
  p.residual = {m.d, orthonormal_basis(res, tol.rank_rel)};
  return p;
}

// Two-dimensional fiber at angle theta in (0, pi/2]: the standard subspace
// of C^2 spanned by y+ = (cos t/2, sin t/2) and y- = (i cos t/2, -i sin t/2).
inline RealSubspace fiber_subspace(double theta) {
  if (!(theta > 0.0 && theta <= 1.5707963267948966 + 1e-12))
    throw Error("BadAngle", "fiber angle must lie in (0, pi/2]");
  double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  Mat f(4, 2);
  f << c, 0.0,
       0.0, c,
       s, 0.0,
       0.0, -s;
  return {2, f};
}

enum class Branch { DeltaLarge, DeltaSmall, DLarge, DSmall };

// Pinned unit eigenvectors of the fiber's modular data: delta branches are
// the complex coordinate axes, d branches the diagonal real directions.
inline Vec fiber_branch_vector(Branch b) {
  Vec v = Vec::Zero(4);
  const double r = 0.7071067811865476;
  switch (b) {
    case Branch::DeltaLarge: v(2) = 1.0; break;
    case Branch::DeltaSmall: v(0) = 1.0; break;
    case Branch::DLarge: v(0) = r; v(2) = -r; break;
    case Branch::DSmall: v(0) = r; v(2) = r; break;
  }
  return v;
}

struct StandardSample {
  RealSubspace k;
  std::vector<double> angles;  // one angle per two-dimensional fiber
};

// Random standard subspace: direct sum of two-dimensional fibers at sampled
// angles (plus one real-line fiber when d is odd, the theta = pi/2 block),
// conjugated by a seeded random unitary.
inline StandardSample random_standard(int d, Rng& rng, double angle_min = 0.1,
                                      double angle_max = 1.47) {
  StandardSample out;
  Mat block = Mat::Zero(2 * d, d);
  int col = 0, row = 0;
  for (int f = 0; f + 1 < d; f += 2) {
    double theta = rng.uniform(angle_min, angle_max);
    out.angles.push_back(theta);
    Mat fib = fiber_subspace(theta).frame;
    block.block(row, col, 4, 2) = fib;
    row += 4;
    col += 2;
  }
  if (d % 2 == 1) block(row, col) = 1.0;  // real axis of the last C fiber
  CMat g(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = Complex(rng.gauss(), rng.gauss());
  CMat q = Eigen::HouseholderQR<CMat>(g).householderQ();
  out.k = RealSubspace{d, realify(q) * block};
  return out;
}

}  // namespace stdsub
