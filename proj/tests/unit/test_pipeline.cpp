#include "doctest.h"

#include <string>

#include "cpswp/pipeline.hpp"

using namespace cpswp;

namespace {
std::string fx(const std::string& name) { return std::string(CPSWP_FIXTURES) + "/" + name; }

PipelineOptions opts(const std::string& program) {
  PipelineOptions o;
  o.program_path = fx(program);
  return o;
}
bool has_warning(const RunReport& r, const std::string& needle) {
  for (const auto& w : r.json["warnings"]) {
    if (w.get<std::string>().find(needle) != std::string::npos) return true;
  }
  return false;
}
}  // namespace

TEST_CASE("cps command") {
  PipelineOptions o = opts("identity.lam");
  RunReport r = cmd_cps(o);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.json["cps"]["formula"] == "\\k0. k0 (\\(x, k1). k1 x)");
  CHECK(r.json["instance"] == "none");
  o.instance = "cost";
  o.json_ast = true;
  r = cmd_cps(o);
  CHECK(r.json["cps"].contains("ast"));
  o.instance = "bogus";
  CHECK(cmd_cps(o).exit_code == kExitInput);
}

TEST_CASE("check-trace exit codes") {
  PipelineOptions o = opts("forever_a.lam");
  o.dfa_path = fx("a_star.dfa.json");
  CHECK(cmd_check_trace(o).exit_code == kExitOk);
  o.program_path = fx("event_b.lam");
  RunReport r = cmd_check_trace(o);
  CHECK(r.exit_code == kExitFails);
  CHECK(r.json["verdict"] == "fails");
  o.program_path = fx("counter_a.lam");
  o.max_unfold = 200;
  CHECK(cmd_check_trace(o).exit_code == kExitUnknown);
}

TEST_CASE("check-trace oracle cross-check") {
  PipelineOptions o = opts("a_then_b.lam");
  o.dfa_path = fx("ab_four.dfa.json");
  o.oracle = true;
  RunReport r = cmd_check_trace(o);
  REQUIRE(r.json.contains("agreement"));
  if (r.json["agreement"]["conclusive"].get<bool>()) CHECK(r.json["agreement"]["agree"] == true);
}

TEST_CASE("nondeterministic automata are rejected") {
  PipelineOptions o = opts("event_a.lam");
  o.dfa_path = fx("nondeterministic.dfa.json");
  RunReport r = cmd_check_trace(o);
  CHECK(r.exit_code == kExitInput);
  CHECK(r.json["error"].get<std::string>().find("at most one") != std::string::npos);
}

TEST_CASE("expected-cost") {
  PipelineOptions o = opts("geometric_p05.lam");
  o.oracle = true;
  RunReport r = cmd_expected_cost(o);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.json["eval_result"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.json["agreement"]["agree"] == true);
  CHECK(r.json["oracle_result"]["upper_gap"] == "unbounded");
  o.moments = 2;
  r = cmd_expected_cost(o);
  CHECK(r.json["eval_result"]["value"][1].get<double>() == doctest::Approx(3.0).epsilon(1e-8));
  o.moments = 0;
  CHECK(cmd_expected_cost(o).exit_code == kExitInput);
}

TEST_CASE("unif skips the oracle with a warning") {
  PipelineOptions o = opts("unif_tick.lam");
  o.oracle = true;
  RunReport r = cmd_expected_cost(o);
  CHECK(r.exit_code == kExitOk);
  CHECK(has_warning(r, "oracle skipped"));
  CHECK_FALSE(r.json.contains("agreement"));
}

TEST_CASE("signature gate") {
  PipelineOptions o = opts("iszero.lam");
  o.signature_path = fx("iszero.sig.json");
  RunReport r = cmd_expected_cost(o);
  CHECK(r.exit_code == kExitSignature);
  CHECK(r.json["signature"]["offending_constants"][0] == "iszero");
  o.unsafe_constants = true;
  r = cmd_expected_cost(o);
  CHECK(r.exit_code == kExitOk);
  CHECK(has_warning(r, "theorem guarantees are void"));
}

TEST_CASE("input errors") {
  PipelineOptions o = opts("no_such_file.lam");
  CHECK(cmd_cps(o).exit_code == kExitInput);
  o = opts("identity.lam");
  o.signature_path = fx("a_star.dfa.json");
  CHECK(cmd_cps(o).exit_code == kExitInput);
}
