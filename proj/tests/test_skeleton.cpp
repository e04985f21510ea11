#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "stdsub/skeleton.hpp"

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

// Rank through a pivoted LU, independent of the SVD route used by
// null_space_basis.
int lu_rank(const Mat& m) {
  Eigen::FullPivLU<Mat> lu(m);
  lu.setThreshold(1e-10);
  return static_cast<int>(lu.rank());
}

}  // namespace

TEST_CASE("skeleton build validates shapes and pairing rank") {
  Mat p = Mat::Identity(2, 2);
  CHECK(error_code([&] { skeleton_build({2, 2}, {}); }) ==
        "DimensionMismatch");
  CHECK(error_code([&] { skeleton_build({2, 0}, {Mat::Zero(2, 0)}); }) ==
        "DegeneratePairing");
  Mat low(2, 2);
  low << 1, 1, 1, 1;  // rank one
  CHECK(error_code([&] { skeleton_build({2, 2}, {low}); }) ==
        "DegeneratePairing");
  Mat wide(2, 3);
  wide.setRandom();  // rank at most 2 < 3 columns
  CHECK(error_code([&] { skeleton_build({2, 3}, {wide}); }) ==
        "DegeneratePairing");
  CHECK_NOTHROW(skeleton_build({2, 2}, {p}));
}

TEST_CASE("even chains with equal blocks have trivial radical") {
  Rng rng(501);
  for (auto dims : std::vector<std::vector<int>>{
           {1, 1}, {2, 2}, {3, 3}, {2, 2, 2, 2}, {1, 1, 1, 1, 1, 1}}) {
    SymplecticSkeleton sk = random_skeleton(dims, rng);
    SkeletonReport rep = skeleton_verify(sk);
    INFO("length " << sk.length() << " total " << sk.total);
    CHECK(rep.block_commutativity_max == 0.0);
    CHECK(rep.distant_pairs_max == 0.0);
    CHECK(rep.radical_dim == 0);
    CHECK(rep.is_factor);
    CHECK(lu_rank(sk.omega) == sk.total);
  }
}

TEST_CASE("unequal even chain satisfies the axioms without being a factor") {
  // Full-column-rank pairings do not force a trivial radical when block
  // dimensions differ; factoriality of even chains needs equal blocks.
  Mat p(2, 1);
  p << 1, 0;
  SymplecticSkeleton sk = skeleton_build({2, 1}, {p});
  SkeletonReport rep = skeleton_verify(sk);
  CHECK(rep.block_commutativity_max == 0.0);
  CHECK(rep.radical_dim == 1);
  CHECK_FALSE(rep.is_factor);
  CHECK(lu_rank(sk.omega) == 2);
}

TEST_CASE("odd chain center matches the chained transport image") {
  Rng rng(502);
  for (auto dims : std::vector<std::vector<int>>{
           {2, 2, 2}, {3, 3, 3}, {2, 2, 2, 2, 2}, {1, 1, 1, 1, 1, 1, 1}}) {
    SymplecticSkeleton sk = random_skeleton(dims, rng);
    SkeletonReport rep = skeleton_verify(sk);
    INFO("length " << sk.length());
    REQUIRE(rep.center_checked);
    CHECK(rep.center_dim == dims[0]);
    CHECK(rep.center_vs_relation <= 1e-9);
    CHECK(lu_rank(sk.omega) == sk.total - dims[0]);
  }
}

TEST_CASE("transport relation vectors annihilate the form directly") {
  // Independent route: build the length-3 center by solving the adjacent
  // relations explicitly and check omega kills it.
  Rng rng(503);
  SymplecticSkeleton sk = random_skeleton({3, 3, 3}, rng);
  Mat u2 = Eigen::FullPivLU<Mat>(sk.pairings[1])
               .solve(Mat(sk.pairings[0].transpose()));
  Mat image = Mat::Zero(sk.total, 3);
  image.block(0, 0, 3, 3) = Mat::Identity(3, 3);
  image.block(sk.offsets[2], 0, 3, 3) = u2;
  CHECK(op_norm(Mat(sk.omega * image)) <= 1e-10 * op_norm(sk.omega));
  // And it exhausts the radical: total rank drops by exactly dims[0].
  CHECK(lu_rank(sk.omega) == sk.total - 3);
}

TEST_CASE("length three involution chain reproduces the stated center") {
  Rng rng(504);
  for (int rep_i = 0; rep_i < 5; ++rep_i) {
    SymplecticSkeleton sk = random_skeleton({2, 2, 2}, rng, true);
    REQUIRE(sk.has_involutions);
    REQUIRE(sk.involutions[1].has_value());
    const Mat& j = *sk.involutions[1];
    Mat id = Mat::Identity(sk.total, sk.total);
    double scale = op_norm(j);
    CHECK(op_norm(Mat(j * j - id)) <= 1e-9 * scale * scale);
    CHECK(op_norm(Mat(j.transpose() * sk.omega * j + sk.omega)) <=
          1e-9 * scale * scale * op_norm(sk.omega));
    // J acts as -I on its own block.
    Mat b1 = sk.block_basis(1);
    CHECK(op_norm(Mat(b1.transpose() * j * b1 + Mat::Identity(2, 2))) <=
          1e-12);
    SkeletonReport rep = skeleton_verify(sk, true);
    REQUIRE(rep.center_checked);
    REQUIRE(rep.stated_formula_checked);
    CHECK(rep.center_vs_relation <= 1e-9);
    CHECK(rep.center_vs_stated <= 1e-9);
  }
}

TEST_CASE("involution feasibility boundaries") {
  Rng rng(505);
  // Even length: every reflection leaves the chain.
  CHECK(error_code([&] { random_skeleton({2, 2}, rng, true); }) ==
        "InvolutionInfeasible");
  // Unequal adjacent blocks: transports cannot be square.
  Mat p01(3, 2);
  p01 << 1, 0, 0, 1, 0, 0;
  Mat p12 = Mat::Identity(2, 2);
  CHECK(error_code([&] {
          skeleton_build({3, 2, 2}, {p01, p12}, true);
        }) == "InvolutionInfeasible");
  // Asking for the stated formula without involutions.
  SymplecticSkeleton sk = random_skeleton({2, 2, 2}, rng, false);
  CHECK(error_code([&] { skeleton_verify(sk, true); }) ==
        "MissingInvolutions");
}

TEST_CASE("odd chains of any length admit the involution family") {
  // The mirrored transport construction satisfies both axioms identically
  // whenever adjacent pairings are square and invertible; length is no
  // obstruction beyond parity.
  Rng rng(507);
  for (auto dims : std::vector<std::vector<int>>{
           {2, 2, 2, 2, 2}, {3, 3, 3, 3, 3, 3, 3}}) {
    SymplecticSkeleton sk = random_skeleton(dims, rng, true);
    REQUIRE(sk.has_involutions);
    int mid = (sk.length() - 1) / 2;
    REQUIRE(sk.involutions[mid].has_value());
    const Mat& j = *sk.involutions[mid];
    Mat id = Mat::Identity(sk.total, sk.total);
    double scale = std::max(1.0, op_norm(j));
    CHECK(op_norm(Mat(j * j - id)) <= 1e-9 * scale * scale);
    CHECK(op_norm(Mat(j.transpose() * sk.omega * j + sk.omega)) <=
          1e-9 * scale * scale * op_norm(sk.omega));
  }
}

TEST_CASE("length five chain leaves the stated center sum unevaluable") {
  // The involution exists, but the stated center sum reflects block zero
  // outside the chain, so only the transport relation describes the center.
  // All-identity pairings keep every quantity exact.
  std::vector<Mat> ps(4, Mat::Identity(2, 2));
  SymplecticSkeleton sk = skeleton_build({2, 2, 2, 2, 2}, ps, true);
  REQUIRE(sk.has_involutions);
  const Mat& j = *sk.involutions[2];
  Mat id = Mat::Identity(sk.total, sk.total);
  CHECK(op_norm(Mat(j * j - id)) <= 1e-12);
  CHECK(op_norm(Mat(j.transpose() * sk.omega * j + sk.omega)) <= 1e-12);
  SkeletonReport rep = skeleton_verify(sk);
  CHECK(rep.center_checked);
  CHECK(rep.center_vs_relation <= 1e-10);
  CHECK_FALSE(rep.stated_formula_checked);
  CHECK(rep.notes.find("outside the chain") != std::string::npos);
  CHECK(error_code([&] { skeleton_verify(sk, true); }) ==
        "MissingInvolutions");
}
