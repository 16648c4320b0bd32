#include <iostream>

#include "CLI11.hpp"
#include "cpswp/pipeline.hpp"

int main(int argc, char** argv) {
  using namespace cpswp;
  CLI::App app{"CPS-based weakest preconditions for effectful programs"};
  app.require_subcommand(1);

  PipelineOptions opts;
  for (int i = 1; i < argc; ++i) opts.argv.emplace_back(argv[i]);
  bool as_json = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("program", opts.program_path, "source program")->required()->check(CLI::ExistingFile);
    sub->add_option("-s,--signature", opts.signature_path, "signature JSON (default: builtin)");
    sub->add_flag("--unsafe-constants", opts.unsafe_constants, "accept constants with sum or arrow coarities");
    sub->add_flag("--json", as_json, "print the JSON report");
    sub->add_flag("--json-ast", opts.json_ast, "include the formula AST in the report");
    sub->add_flag("--typed", opts.typed, "print binder types");
  };
  auto numeric = [&](CLI::App* sub) {
    sub->add_option("--epsilon", opts.epsilon, "convergence tolerance")->capture_default_str();
    sub->add_option("--max-unfold", opts.max_unfold, "cap on letrec body evaluations")->capture_default_str();
    sub->add_option("--quad-points", opts.quad_points, "midpoint samples for unif")->capture_default_str();
    sub->add_flag("--oracle", opts.oracle, "cross-check against the direct semantics");
    sub->add_option("--oracle-depth", opts.oracle_depth, "letrec unfoldings per run in the oracle");
    sub->add_flag("--dump-oracle", opts.dump_oracle, "include the oracle's semantic object in the report");
  };

  auto* cps = app.add_subcommand("cps", "print the CPS formula");
  common(cps);
  cps->add_option("--instance", opts.instance, "apply the trace or cost rewrite")
      ->check(CLI::IsMember({"trace", "cost"}));

  auto* trace = app.add_subcommand("check-trace", "decide Trace(M) within L(automaton)");
  common(trace);
  numeric(trace);
  trace->add_option("-d,--dfa", opts.dfa_path, "automaton JSON")->required();

  auto* cost = app.add_subcommand("expected-cost", "expected cost or higher moments");
  common(cost);
  numeric(cost);
  cost->add_option("--moments", opts.moments, "number of moments")->capture_default_str()->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  RunReport report;
  if (*cps) {
    report = cmd_cps(opts);
  } else if (*trace) {
    report = cmd_check_trace(opts);
  } else {
    report = cmd_expected_cost(opts);
  }
  if (as_json) {
    std::cout << report.json.dump(2) << "\n";
  } else {
    (report.exit_code == kExitInput || report.exit_code == kExitSignature ? std::cerr : std::cout) << report.text;
  }
  return report.exit_code;
}
