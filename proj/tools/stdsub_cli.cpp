// Scenario driven front end. The JSON report goes to stdout or the --out
// path; the human readable summary table goes to stderr so stdout stays
// machine parseable. Exit codes: 0 all checks pass, 1 check failure or
// infeasible scenario, 2 usage or parse error.

#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "stdsub/scenario.hpp"

namespace {

int emit(const stdsub::Report& r, const std::string& out_path) {
  const std::string bytes = stdsub::report_bytes(r);
  if (!out_path.empty()) {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::fprintf(stderr, "error: cannot write report to '%s'\n",
                   out_path.c_str());
      return 2;
    }
    f << bytes;
  } else {
    std::fputs(bytes.c_str(), stdout);
  }
  std::fputs(stdsub::summary_table(r).c_str(), stderr);
  return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "stdsub: verification workbench for standard subspaces. Runs named "
      "check batteries from JSON scenarios and emits deterministic JSON "
      "reports; see docs/claims.md for the claim registry."};
  app.require_subcommand(0, 1);

  std::string scenario_path, out_path;
  long long seed = 42;
  double tol = 0.0;
  auto* scn_opt = app.add_option(
      "--scenario", scenario_path,
      "JSON scenario file; replaces the subcommand defaults entirely");
  auto* seed_opt =
      app.add_option("--seed", seed, "random seed (default 42)");
  auto* tol_opt = app.add_option(
      "--tol", tol,
      "tolerance override applied to every check; residuals stay put, "
      "verdicts move");
  auto* out_opt =
      app.add_option("--out", out_path, "write the JSON report to this path");

  const char* mode_names[8] = {"lattice", "modular", "tower",    "skeleton",
                               "seqmodel", "classify", "fock",    "suite"};
  const char* mode_help[8] = {
      "complement duality checks on random subspaces",
      "modular reconstruction, flow invariance and fiber formulas",
      "tower regimes with crossed product checks",
      "symplectic chain axioms, radical and center formulas",
      "extension certificates with partial sum cross checks",
      "tensor model type classification",
      "truncated second quantization checks",
      "the full pinned seed acceptance battery"};
  for (int i = 0; i < 8; ++i)
    app.add_subcommand(mode_names[i], mode_help[i])->fallthrough();
  app.add_subcommand("claims", "print the claim registry anchoring the checks")
      ->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (app.get_subcommand_ptr("claims")->parsed()) {
    for (const auto& c : stdsub::claim_registry())
      std::printf("%s\n  %s\n", c.id.c_str(), c.statement.c_str());
    std::printf("plumbing\n  infrastructure checks carrying no claim.\n");
    return 0;
  }

  std::string mode;
  for (int i = 0; i < 8; ++i)
    if (app.get_subcommand_ptr(mode_names[i])->parsed()) mode = mode_names[i];
  if (!scn_opt->count() && mode.empty()) {
    std::fputs(app.help().c_str(), stderr);
    return 2;
  }
  if (scn_opt->count() && !mode.empty()) {
    std::fputs("error: use either a subcommand or --scenario, not both\n",
               stderr);
    return 2;
  }

  try {
    stdsub::Scenario s;
    if (scn_opt->count()) {
      std::ifstream in(scenario_path, std::ios::binary);
      if (!in) {
        std::fprintf(stderr, "error: cannot read scenario file '%s'\n",
                     scenario_path.c_str());
        return 2;
      }
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      s = stdsub::parse_scenario_text(text);
    } else {
      stdsub::Json j{{"mode", mode == "classify" ? "seqmodel" : mode}};
      if (mode == "classify")
        j["params"] = stdsub::Json{{"op", "classify"}, {"rule", "constant"}};
      s = stdsub::parse_scenario(j);
    }
    if (seed_opt->count()) {
      if (seed < 0) {
        std::fputs("error: --seed must be nonnegative\n", stderr);
        return 2;
      }
      s.seed = static_cast<std::uint64_t>(seed);
    }
    if (tol_opt->count()) {
      if (!(tol > 0.0)) {
        std::fputs("error: --tol must be positive\n", stderr);
        return 2;
      }
      s.has_tol_override = true;
      s.tol_override = tol;
    }
    if (out_opt->count()) s.out = out_path;
    stdsub::Report r = stdsub::run_scenario(s);
    return emit(r, s.out);
  } catch (const stdsub::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    const std::string what = e.what();
    return what.rfind("ParseError", 0) == 0 ? 2 : 1;
  }
}
