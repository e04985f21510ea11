#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>

#include "stdsub/report.hpp"

using namespace stdsub;

TEST_CASE("claim registry ids are unique and resolvable") {
  std::set<std::string> seen;
  for (const auto& c : claim_registry()) {
    CHECK(seen.insert(c.id).second);
    CHECK_FALSE(c.statement.empty());
    CHECK(known_claim(c.id));
  }
  CHECK(known_claim("plumbing"));
  CHECK_FALSE(known_claim("nonexistent.claim"));
  CHECK_FALSE(known_claim(""));

  Report r;
  CHECK_THROWS_AS(r.add("x", "nonexistent.claim", 0.0, 1.0), Error);
}

TEST_CASE("registry ids all appear in the shipped claims table") {
  std::ifstream in(STDSUB_SOURCE_DIR "/docs/claims.md");
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string docs = buf.str();
  for (const auto& c : claim_registry()) {
    INFO("claim id " << c.id);
    CHECK(docs.find("`" + c.id + "`") != std::string::npos);
  }
}

TEST_CASE("verdicts are a pure function of residual and tolerance") {
  Report r;
  CHECK(r.add("a", "plumbing", 1e-9, 1e-8).pass);
  CHECK(r.add("b", "plumbing", 1e-8, 1e-8).pass);  // boundary included
  CHECK_FALSE(r.add("c", "plumbing", 2e-8, 1e-8).pass);
  CHECK(r.add_exact("d", "plumbing", true).pass);
  CHECK_FALSE(r.add_exact("e", "plumbing", false).pass);
  CHECK(r.add("f", "plumbing", 0.0, 0.0).pass);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("reports sort by check name and serialize deterministically") {
  Report r;
  r.seed = 7;
  r.add("zeta", "plumbing", 0.5, 1.0);
  r.add("alpha", "plumbing", 0.0, 0.0);
  r.add("mid", "plumbing", 2.0, 1.0, "expected failure");
  r.sort_checks();
  REQUIRE(r.checks.size() == 3);
  CHECK(r.checks[0].name == "alpha");
  CHECK(r.checks[2].name == "zeta");

  Json j = report_json(r);
  CHECK(j.at("checks").size() == 3);
  CHECK(j.at("checks")[0].at("name") == "alpha");
  CHECK(j.at("checks")[2].at("verdict") == "pass");
  CHECK(j.at("checks")[1].at("verdict") == "fail");
  CHECK(j.at("summary").at("passed") == 2);
  CHECK(j.at("summary").at("failed") == 1);
  CHECK(j.at("summary").at("verdict") == "fail");
  CHECK(j.at("environment").at("seed") == 7);
  CHECK(j.at("environment").at("version") == k_version);

  // Wall time is the single field excluded from the byte contract.
  Report r2 = r;
  r2.wall_time_ms = 123.0;
  r.wall_time_ms = 9.0;
  CHECK(canonical_bytes(r) == canonical_bytes(r2));
  CHECK(report_bytes(r) != report_bytes(r2));

  Report r3 = r;
  r3.checks[0].residual = 1e-3;
  CHECK(canonical_bytes(r) != canonical_bytes(r3));
}

TEST_CASE("tolerance override keeps residuals and moves verdicts") {
  Report r;
  r.add("a", "plumbing", 5e-4, 1e-8);  // fails tight
  r.add("b", "plumbing", 0.0, 0.0);
  r.add("c", "plumbing", 2e-3, 1e-8);  // fails loose too
  CHECK_FALSE(r.checks[0].pass);
  r.override_tolerance(1e-3);
  CHECK(r.checks[0].pass);
  CHECK(r.checks[0].residual == 5e-4);
  CHECK(r.checks[0].tolerance == 1e-3);
  CHECK(r.checks[1].pass);
  CHECK_FALSE(r.checks[2].pass);
}

TEST_CASE("summary table lists every check with its claim") {
  Report r;
  r.add("some.check", "lattice.duality", 1e-12, 1e-8);
  r.add("other.check", "plumbing", 2.0, 1.0);
  r.sort_checks();
  std::string table = summary_table(r);
  CHECK(table.find("some.check") != std::string::npos);
  CHECK(table.find("lattice.duality") != std::string::npos);
  CHECK(table.find("FAIL") != std::string::npos);
  CHECK(table.find("checks: 2  passed: 1  failed: 1") != std::string::npos);
}
