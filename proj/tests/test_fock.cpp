#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "stdsub/fock.hpp"

using namespace stdsub;

namespace {

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code;
  }
  return "";
}

// Independent oracle: the truncated exponential series sum_{n<=N} z^n / n!.
Complex truncated_exp(Complex z, int cutoff) {
  Complex sum = 1.0;
  Complex term = 1.0;
  for (int n = 1; n <= cutoff; ++n) {
    term *= z / static_cast<double>(n);
    sum += term;
  }
  return sum;
}

CVec cvec1(Complex a) {
  CVec v(1);
  v << a;
  return v;
}

CVec cvec2(Complex a, Complex b) {
  CVec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("fock basis enumeration is graded lexicographic") {
  TruncatedFock f = fock_space(2, 3);
  CHECK(f.dim() == 10);
  CHECK(f.basis[0] == std::vector<int>{0, 0});
  CHECK(f.basis[1] == std::vector<int>{0, 1});
  CHECK(f.basis[2] == std::vector<int>{1, 0});
  CHECK(f.basis[3] == std::vector<int>{0, 2});
  CHECK(f.basis[4] == std::vector<int>{1, 1});
  CHECK(f.basis[5] == std::vector<int>{2, 0});
  CHECK(f.sector_dim(1) == 3);
  for (int b = 0; b < f.dim(); ++b) CHECK(f.index.at(f.basis[b]) == b);
  for (int b = 1; b < f.dim(); ++b) CHECK(f.grade(b) >= f.grade(b - 1));

  CHECK(fock_space(1, 32).dim() == 33);
  CHECK(error_code([] { fock_space(0, 3); }) == "DimensionMismatch");
  CHECK(error_code([] { fock_space(1, -1); }) == "DimensionMismatch");
}

TEST_CASE("coherent vectors reproduce the exponential pairing") {
  TruncatedFock f = fock_space(2, 12);
  CVec u = cvec2(Complex(0.4, 0.2), Complex(-0.3, 0.5));
  CVec w = cvec2(Complex(0.1, -0.6), Complex(0.7, 0.1));
  FockVector eu = coherent(u, f);
  FockVector ew = coherent(w, f);

  // Blockwise identity: the truncated pairing equals the truncated series
  // of <u, w> exactly, grade by grade.
  Complex pairing = eu.coeffs.dot(ew.coeffs);
  Complex series = truncated_exp(u.dot(w), f.cutoff);
  CHECK(std::abs(pairing - series) <= 1e-13);

  // Against the full exponential the gap is the calibrated tail.
  double tol = fock_tolerance(f, std::max(u.norm(), w.norm()));
  CHECK(std::abs(pairing - std::exp(u.dot(w))) <= 10.0 * tol);
  CHECK(std::abs(eu.coeffs.squaredNorm() - std::exp(u.squaredNorm())) <=
        10.0 * tol);

  CHECK(eu.tail == Catch::Approx(tail_bound(f.cutoff, u.norm())));
  FockVector vac = coherent(CVec::Zero(2), f);
  CHECK((vac.coeffs - vacuum(f).coeffs).norm() == 0.0);
  CHECK(error_code([&] { coherent(cvec2(2.0, 0.0), f); }) == "RadiusExceeded");
  CHECK(error_code([&] { coherent(cvec1(0.1), f); }) == "DimensionMismatch");
}

TEST_CASE("creation and annihilation close the commutation relation") {
  TruncatedFock f = fock_space(2, 6);
  CVec h = cvec2(Complex(0.3, 0.4), Complex(-0.2, 0.1));
  CVec k = cvec2(Complex(-0.5, 0.2), Complex(0.6, 0.3));

  CMat ah = annihilation(h, f);
  CMat ck = creation(k, f);
  CMat comm = ah * ck - ck * ah - h.dot(k) * CMat::Identity(f.dim(), f.dim());
  // Exact below the top grade; the cutoff only damages grade N inputs.
  int low = f.sector_dim(f.cutoff - 1);
  CHECK(op_norm(CMat(comm.leftCols(low))) <= 1e-13);
  CHECK(op_norm(CMat(comm.rightCols(f.dim() - low))) > 0.1);

  // Annihilation eigenrelation on coherent vectors, exact below grade N.
  CVec g = cvec2(Complex(0.5, -0.1), Complex(0.2, 0.2));
  FockVector eg = coherent(g, f);
  CVec diff = ah * eg.coeffs - h.dot(g) * eg.coeffs;
  CHECK(diff.head(f.sector_dim(f.cutoff - 1)).norm() <= 1e-13);

  // Field normalization: <e^0, Phi(h)^2 e^0> = |h|^2 / 2.
  CMat phi = field(h, f);
  Complex second_moment = (phi * phi)(0, 0);
  CHECK(second_moment.real() == Catch::Approx(h.squaredNorm() / 2.0));
  CHECK(std::abs(second_moment.imag()) <= 1e-14);
  CHECK(op_norm(CMat(phi - phi.adjoint())) <= 1e-14);
}

TEST_CASE("weyl operators are unitary and calibrate the vacuum amplitude") {
  TruncatedFock f = fock_space(1, 32, 1.0);
  CVec h = cvec1(1.0);
  FockOperator w = weyl(h, f);
  double tol = fock_tolerance(f, 1.0);

  REQUIRE(w.unitarity_defect.has_value());
  CHECK(*w.unitarity_defect <= 1e-12);

  // The vacuum expectation is the calibration law, not the definition.
  Complex amp = w.m(0, 0);
  CHECK(std::abs(amp - std::exp(Complex(-0.25, 0.0))) <= tol);
  CHECK(std::abs(amp - std::exp(Complex(-0.25, 0.0))) <= 1e-10);

  // W(h) e^0 = e^{-|h|^2/4} coherent(i h / sqrt 2).
  FockVector target = coherent(CVec(Complex(0.0, 1.0) / std::sqrt(2.0) * h), f);
  CVec lhs = w.m.col(0);
  CVec rhs = std::exp(-h.squaredNorm() / 4.0) * target.coeffs;
  CHECK((lhs - rhs).norm() <= 10.0 * tol);

  // Inverse relation: W(h) W(-h) = I up to rounding (same field operator).
  FockOperator winv = weyl(CVec(-h), f);
  CHECK(op_norm(CMat(w.m * winv.m - CMat::Identity(f.dim(), f.dim()))) <=
        1e-12);

  FockOperator wz = weyl(CVec(CVec::Zero(1)), f);
  CHECK(op_norm(CMat(wz.m - CMat::Identity(f.dim(), f.dim()))) <= 1e-13);

  CHECK(error_code([&] { weyl(cvec1(1.2), f); }) == "RadiusExceeded");

  // Complex argument: same law with |h|^2 = 0.25.
  FockOperator wc = weyl(cvec1(Complex(0.3, 0.4)), f);
  CHECK(std::abs(wc.m(0, 0) - std::exp(Complex(-0.0625, 0.0))) <= tol);
}

TEST_CASE("weyl relations compose with the symplectic phase") {
  TruncatedFock f = fock_space(1, 24, 1.0);
  CVec h = cvec1(0.4);
  CVec k = cvec1(Complex(0.0, 0.3));
  // <h, k> = 0.12 i, so the composition carries a genuine phase.

  SectorDefect def = ccr_defect(h, k, f);
  CHECK(def.value <= 10.0 * def.tolerance);
  CHECK(def.sector_max_particles == 12);
  CHECK(def.sector_dim == 13);

  // Real pair: the phase is one and the relation is plain composition.
  SectorDefect real_pair = ccr_defect(cvec1(0.4), cvec1(0.5), f);
  CHECK(real_pair.value <= 10.0 * real_pair.tolerance);

  // Phase conjugation symmetry: defect(h, k) matches defect(k, -h).
  SectorDefect swapped = ccr_defect(k, CVec(-h), f);
  CHECK(std::abs(def.value - swapped.value) <= 2.0 * def.tolerance);

  // Zero argument composes exactly.
  SectorDefect trivial = ccr_defect(CVec(CVec::Zero(1)), k, f);
  CHECK(trivial.value <= 1e-14);

  CHECK(error_code([&] { ccr_defect(cvec1(0.8), cvec1(0.4), f); }) ==
        "RadiusExceeded");

  // Control: omega(h, k) = 0.12 != 0, so the commutator norm must sit at
  // 2 |sin(omega / 2)|, far above every truncation tolerance.
  double control = commutator_norm(h, k, f);
  CHECK(control == Catch::Approx(2.0 * std::sin(0.06)).margin(1e-9));
  CHECK(control > 1e-2);
}

TEST_CASE("second quantization is blockwise exact") {
  TruncatedFock f = fock_space(2, 12);

  FockOperator id = gamma(CMat::Identity(2, 2), f);
  CHECK(op_norm(CMat(id.m - CMat::Identity(f.dim(), f.dim()))) <= 1e-15);
  CHECK(id.warning.empty());

  // Pairing law <e^u, Gamma(A) e^w> = exp <u, A w>: exactly the truncated
  // series, and the full exponential within the tail.
  CMat a(2, 2);
  a << Complex(0.3, 0.2), Complex(-0.4, 0.1),
       Complex(0.1, -0.3), Complex(0.2, 0.4);
  a /= (2.0 * op_norm(a));
  FockOperator ga = gamma(a, f);
  CHECK(ga.warning.empty());
  CVec u = cvec2(Complex(0.5, -0.2), Complex(0.3, 0.4));
  CVec w = cvec2(Complex(-0.1, 0.6), Complex(0.4, -0.3));
  Complex pairing = coherent(u, f).coeffs.dot(ga.m * coherent(w, f).coeffs);
  Complex z = u.dot(CVec(a * w));
  CHECK(std::abs(pairing - truncated_exp(z, f.cutoff)) <= 1e-13);
  CHECK(std::abs(pairing - std::exp(z)) <=
        10.0 * fock_tolerance(f, std::max(u.norm(), w.norm())));

  // Coherent covariance Gamma(A) e^g = e^{Ag} holds exactly at the cutoff
  // because both sides are blockwise; run it on genuine modular data.
  ModularData md = tomita(fiber_subspace(std::acos(-1.0) / 3.0));
  CMat root = complexify(delta_power(md, 0.5));
  FockOperator groot = gamma(root, f);
  CHECK_FALSE(groot.warning.empty());  // norm sqrt(cot(pi/6)) > 1
  CVec g = cvec2(Complex(0.3, 0.1), Complex(-0.2, 0.4));
  CVec lhs = groot.m * coherent(g, f).coeffs;
  CVec rhs = coherent(CVec(root * g), f).coeffs;
  CHECK((lhs - rhs).norm() <= 1e-12);

  // An anti-linear one-particle map second-quantizes as the linear part
  // composed with entrywise conjugation of occupation coefficients.
  CMat jlin = complexify(Mat(md.j * ComplexSpace{2}.conjugation()));
  FockOperator gj = gamma(jlin, f);
  CVec jg = complexify_vec(Vec(md.j * realify_vec(g)));
  CVec alhs = gj.m * coherent(g, f).coeffs.conjugate();
  CHECK((alhs - coherent(jg, f).coeffs).norm() <= 1e-12);

  // Number grading: Gamma(e^{i t} I) = e^{i n t} per sector, exactly.
  Complex rot = std::exp(Complex(0.0, 0.7));
  FockOperator grot = gamma(CMat(rot * CMat::Identity(2, 2)), f);
  for (int b = 0; b < f.dim(); ++b) {
    Complex want = std::exp(Complex(0.0, 0.7 * f.grade(b)));
    CHECK(std::abs(grot.m(b, b) - want) <= 1e-13);
  }
  CMat offdiag = grot.m;
  offdiag.diagonal().setZero();
  CHECK(op_norm(offdiag) <= 1e-13);

  CHECK(error_code([&] { gamma(CMat::Identity(3, 3), f); }) ==
        "DimensionMismatch");
}

TEST_CASE("commutant samples commute up to truncation") {
  Rng rng(907);

  SECTION("real axis in one mode is its own symplectic complement") {
    TruncatedFock f = fock_space(1, 24, 1.0);
    RealSubspace axis{1, Mat::Identity(2, 1)};
    SectorDefect def = commutant_defect(axis, 10, f, rng);
    CHECK(def.value <= 10.0 * def.tolerance);
    CHECK(def.sector_max_particles == 12);

    // Control inside K itself: omega(h, i h) = |h|^2 != 0.
    CVec h = cvec1(0.45);
    CVec ih = cvec1(Complex(0.0, 0.45));
    CHECK(commutator_norm(h, ih, f) > 1e-2);
  }

  SECTION("angle fiber subspace against its computed complement") {
    // Non-colinear pairs, so the fields genuinely fail to commute as
    // matrices and only the symplectic phase cancels the commutator.
    TruncatedFock f = fock_space(2, 16, 1.0);
    RealSubspace fiber = fiber_subspace(1.1);
    SectorDefect def = commutant_defect(fiber, 6, f, rng);
    CHECK(def.value <= 10.0 * def.tolerance);
    CHECK(def.value <= 1e-3);  // truncation scale at this cutoff
    CHECK(def.value > 0.0);
  }

  SECTION("input validation") {
    TruncatedFock f = fock_space(1, 8, 1.0);
    CHECK(error_code([&] {
            Rng r2(1);
            commutant_defect(fiber_subspace(1.0), 2, f, r2);
          }) == "DimensionMismatch");
    CHECK(error_code([&] {
            Rng r2(1);
            RealSubspace axis{1, Mat::Identity(2, 1)};
            commutant_defect(axis, 0, f, r2);
          }) == "IndexOutOfRange");
  }
}
