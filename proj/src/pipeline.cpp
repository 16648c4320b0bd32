#include "cpswp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "cpswp/algebra.hpp"
#include "cpswp/cps.hpp"
#include "cpswp/dfa.hpp"
#include "cpswp/error.hpp"
#include "cpswp/oracle.hpp"
#include "cpswp/parse.hpp"
#include "cpswp/signature.hpp"

namespace cpswp {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const char* kUnsafeWarning =
    "--unsafe-constants: theorem guarantees are void; a constant's coarity contains empty, + or ->, so the CPS "
    "formula need not equal the weakest precondition";

struct SignatureGate : Error {
  using Error::Error;
};

class Run {
 public:
  Run(const PipelineOptions& opts, std::string command) : opts_(opts) {
    report_.json["command"] = std::move(command);
    report_.json["arguments"] = opts.argv;
    report_.json["warnings"] = json::array();
    report_.json["timings_ms"] = json::object();
  }

  void warn(const std::string& w) {
    report_.json["warnings"].push_back(w);
    text_ << "warning: " << w << "\n";
  }

  template <class F>
  auto timed(const std::string& phase, F&& f) {
    auto t0 = Clock::now();
    auto r = f();
    report_.json["timings_ms"][phase] = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    return r;
  }

  Signature signature(std::string_view builtin) {
    Signature sig = opts_.signature_path.empty() ? builtin_signature(builtin) : load_signature_file(opts_.signature_path);
    SignatureReport r = validate_signature(sig);
    report_.json["signature"] = {{"source", opts_.signature_path.empty() ? "builtin:" + std::string(builtin)
                                                                         : opts_.signature_path},
                                 {"ok", r.ok},
                                 {"offending_constants", r.offending_constants},
                                 {"messages", r.messages},
                                 {"unsafe_constants", opts_.unsafe_constants}};
    if (!r.ok) {
      for (const auto& m : r.messages) text_ << "signature: " << m << "\n";
      if (!opts_.unsafe_constants) throw SignatureGate("signature rejected; pass --unsafe-constants to proceed anyway");
      warn(kUnsafeWarning);
    }
    return sig;
  }

  CpsOutput cps(const Signature& sig, SourceTerm& program) {
    program = timed("parse", [&] { return parse_program(read_text_file(opts_.program_path), sig); });
    return timed("cps", [&] { return cps_term(sig, program); });
  }

  void record_cps(const CpsOutput& out, const TargetTerm& formula, const Signature& sig) {
    PrintOptions po{opts_.typed, &sig};
    json c;
    c["type"] = to_string(out.type);
    c["source_type"] = to_string(out.source_type);
    c["raw"] = pretty_print(out.term, po);
    c["formula"] = pretty_print(normalize(formula), po);
    if (opts_.json_ast) c["ast"] = json::parse(target_to_json(formula));
    report_.json["cps"] = c;
  }

  RunReport finish(int code) {
    report_.exit_code = code;
    report_.json["exit_code"] = code;
    report_.text = text_.str();
    return report_;
  }

  template <class F>
  RunReport guarded(F&& body) {
    try {
      return finish(body());
    } catch (const SignatureGate& e) {
      report_.json["error"] = e.what();
      text_ << "error: " << e.what() << "\n";
      return finish(kExitSignature);
    } catch (const std::exception& e) {
      report_.json["error"] = e.what();
      text_ << "error: " << e.what() << "\n";
      return finish(kExitInput);
    }
  }

  AlgebraConfig config(AlgebraKind kind, std::shared_ptr<const Dfa> dfa = nullptr) const {
    AlgebraConfig c;
    c.kind = kind;
    c.moment_order = opts_.moments;
    c.epsilon = opts_.epsilon;
    c.max_unfold = opts_.max_unfold;
    c.quad_points = opts_.quad_points;
    c.dfa = std::move(dfa);
    c.validate();
    return c;
  }

  const PipelineOptions& opts_;
  RunReport report_;
  std::ostringstream text_;
};

std::string weight_text(double w) {
  if (std::isinf(w)) return "inf";
  std::ostringstream s;
  s.precision(12);
  s << w;
  return s.str();
}

std::string answer_text(const AnswerValue& v, const AlgebraConfig& c) {
  if (const double* w = std::get_if<double>(&v)) return weight_text(*w);
  if (const auto* vec = std::get_if<WeightVector>(&v)) {
    std::string out = "(";
    for (std::size_t i = 0; i < vec->size(); ++i) out += (i ? ", " : "") + weight_text((*vec)[i]);
    return out + ")";
  }
  if (const auto* s = std::get_if<StateSet>(&v)) return c.dfa ? c.dfa->describe(*s) : "{...}";
  return answer_to_json(v, c).dump();
}

}  // namespace

RunReport cmd_cps(const PipelineOptions& opts) {
  Run run(opts, "cps");
  return run.guarded([&] {
    if (!opts.instance.empty() && opts.instance != "trace" && opts.instance != "cost") {
      throw Error("unknown instance '" + opts.instance + "' (expected trace or cost)");
    }
    Signature sig = run.signature(opts.instance.empty() ? "all" : opts.instance);
    SourceTerm program;
    CpsOutput out = run.cps(sig, program);
    TargetTerm formula = out.term;
    if (opts.instance == "trace") formula = rewrite_trace(formula);
    if (opts.instance == "cost") formula = rewrite_cost(formula);
    run.record_cps(out, formula, sig);
    run.report_.json["instance"] = opts.instance.empty() ? "none" : opts.instance;
    run.text_ << run.report_.json["cps"]["formula"].get<std::string>() << "\n";
    return kExitOk;
  });
}

RunReport cmd_check_trace(const PipelineOptions& opts) {
  Run run(opts, "check-trace");
  return run.guarded([&] {
    Signature sig = run.signature("trace");
    auto dfa = run.timed("dfa", [&] { return std::make_shared<const Dfa>(load_dfa_file(opts.dfa_path)); });
    SourceTerm program;
    CpsOutput out = run.cps(sig, program);
    TargetTerm formula = t_app(rewrite_trace(out.term), t_lam("x", cps_type(out.source_type), t_true()));
    run.record_cps(out, formula, sig);
    AlgebraConfig cfg = run.config(AlgebraKind::Trace, dfa);
    TraceCheck check = run.timed("evaluate", [&] { return check_trace_property(cfg, formula); });
    for (const auto& w : check.warnings) run.warn(w);
    run.report_.json["eval_result"] = eval_result_to_json(check.result, cfg);
    run.report_.json["verdict"] = to_string(check.verdict);
    run.text_ << "verdict: " << to_string(check.verdict) << "\n"
              << "states: " << answer_text(check.result.value, cfg) << " (" << to_string(check.result.status) << ", "
              << check.result.iterations << " rounds)\n";
    if (opts.oracle) {
      int depth = opts.oracle_depth.value_or(kDefaultTraceOracleDepth);
      TraceApprox approx = run.timed("oracle", [&] { return run_trace(sig, program, depth); });
      Verdict ov = oracle_trace_verdict(approx, *dfa);
      json o = {{"kind", "trace"}, {"depth", depth}, {"verdict", to_string(ov)}, {"complete", approx.complete}};
      if (opts.dump_oracle) o["approximation"] = trace_approx_to_json(approx);
      run.report_.json["oracle_result"] = o;
      bool conclusive = ov != Verdict::Unknown && check.verdict != Verdict::Unknown;
      json agree = {{"conclusive", conclusive}};
      agree["agree"] = conclusive ? json(ov == check.verdict) : json(nullptr);
      run.report_.json["agreement"] = agree;
      run.text_ << "oracle (depth " << depth << "): " << to_string(ov);
      if (conclusive) run.text_ << (ov == check.verdict ? ", agrees" : ", DISAGREES");
      run.text_ << "\n";
    }
    switch (check.verdict) {
      case Verdict::Holds:
        return kExitOk;
      case Verdict::Fails:
        return kExitFails;
      case Verdict::Unknown:
        return kExitUnknown;
    }
    return kExitUnknown;
  });
}

RunReport cmd_expected_cost(const PipelineOptions& opts) {
  Run run(opts, "expected-cost");
  return run.guarded([&] {
    if (opts.moments < 1) throw Error("--moments must be at least 1");
    Signature sig = run.signature("cost");
    SourceTerm program;
    CpsOutput out = run.cps(sig, program);
    TargetTerm formula = t_app(rewrite_cost(out.term), t_lam("x", cps_type(out.source_type), t_weight(0)));
    run.record_cps(out, formula, sig);
    AlgebraConfig cfg = run.config(opts.moments == 1 ? AlgebraKind::Cost : AlgebraKind::Moments);
    EvalResult r = run.timed("evaluate", [&] { return evaluate(cfg, formula); });
    run.report_.json["eval_result"] = eval_result_to_json(r, cfg);
    run.text_ << (opts.moments == 1 ? "expected cost: " : "moments: ") << answer_text(r.value, cfg) << " ("
              << to_string(r.status) << ", " << r.iterations << " rounds)\n";
    if (opts.oracle) {
      int depth = opts.oracle_depth.value_or(kDefaultCostOracleDepth);
      try {
        CostDistribution dist = run.timed("oracle", [&] { return run_cost(sig, program, depth); });
        EctBound ect = oracle_ect(dist);
        WeightVector mom = oracle_moments(dist, opts.moments);
        json o = {{"kind", "cost"},
                  {"depth", depth},
                  {"lower", mom.size() == 1 ? json(ect.lower) : json(mom)},
                  {"truncated_mass", dist.truncated_mass},
                  {"upper_gap", ect.bounded ? json(ect.upper_gap) : json("unbounded")}};
        if (opts.dump_oracle) o["distribution"] = cost_distribution_to_json(dist);
        run.report_.json["oracle_result"] = o;
        WeightVector analytic =
            opts.moments == 1 ? WeightVector{std::get<double>(r.value)} : std::get<WeightVector>(r.value);
        // With unbounded truncation only analytic >= oracle lower is checkable.
        double diff = 0;
        bool agree = true;
        double tolerance = 1e-6 + opts.epsilon + (ect.bounded ? ect.upper_gap : 0.0);
        for (std::size_t i = 0; i < mom.size(); ++i) {
          double d = analytic[i] == mom[i] ? 0.0 : std::fabs(analytic[i] - mom[i]);
          diff = std::max(diff, d);
          if (ect.bounded ? d > tolerance : analytic[i] < mom[i] - tolerance) agree = false;
        }
        run.report_.json["agreement"] = {{"conclusive", ect.bounded}, {"agree", agree}, {"difference", diff}};
        run.text_ << "oracle (depth " << depth << "): lower " << answer_text(mom.size() == 1 ? AnswerValue(mom[0]) : AnswerValue(mom), cfg)
                  << ", truncated mass " << dist.truncated_mass;
        run.text_ << (agree ? ", agrees" : ", DISAGREES") << (ect.bounded ? "" : " (one-sided)");
        run.text_ << "\n";
      } catch (const OracleError& e) {
        run.warn(std::string("oracle skipped: ") + e.what());
      }
    }
    return kExitOk;
  });
}

}  // namespace cpswp
