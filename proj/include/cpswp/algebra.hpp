#pragma once

// Evaluation of target formulas under an answer algebra: trace (sets of DFA
// states), cost ([0, inf]) and moments ([0, inf]^n). Recursion is solved by
// chaotic Kleene iteration from the algebra's bottom element.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpswp/dfa.hpp"
#include "cpswp/ground.hpp"
#include "cpswp/target.hpp"
#include "json.hpp"

namespace cpswp {

enum class AlgebraKind { Trace, Cost, Moments };

struct AlgebraConfig {
  AlgebraKind kind = AlgebraKind::Cost;
  std::shared_ptr<const Dfa> dfa;  // trace only
  int moment_order = 1;            // moments only
  double epsilon = 1e-9;
  std::uint64_t max_unfold = 1000000;
  int quad_points = 1024;
  // Quantifiers over nat range over 0..nat_bound-1; unset means nat is not
  // an admissible quantifier domain.
  std::optional<std::uint64_t> nat_bound;

  // Throws Error on nonsensical settings.
  void validate() const;
};

using WeightVector = std::vector<double>;

// A predicate-valued result; its table lives only inside the evaluation.
struct PredicateValue {
  std::string description;
};

using AnswerValue = std::variant<StateSet, double, WeightVector, GroundValue, PredicateValue>;

enum class EvalStatus { Exact, Converged, Truncated };
std::string to_string(EvalStatus s);

struct EvalResult {
  AnswerValue value;
  EvalStatus status = EvalStatus::Exact;
  std::uint64_t iterations = 0;     // rounds of the global iteration
  std::uint64_t unfoldings = 0;     // letrec body evaluations
  std::optional<double> error_bound;
};

// Free variables of the term are looked up in env; ground entries bind data,
// the others bind answers.
EvalResult evaluate(const AlgebraConfig& config, const std::map<std::string, AnswerValue>& env,
                    const TargetTerm& term);
EvalResult evaluate(const AlgebraConfig& config, const TargetTerm& term);

// i-th component: b^i + sum_{j=1..i} C(i,j) a_j b^(i-j); 0 * inf = 0.
WeightVector elapse(const WeightVector& a, double b);
// (w, w^2, ..., w^n), the moments of a run of deterministic cost w.
WeightVector weight_powers(double w, int n);

struct FixpointTable {
  std::vector<std::pair<GroundValue, AnswerValue>> entries;
  EvalStatus status = EvalStatus::Exact;
  std::uint64_t iterations = 0;
};

// Solves letrec fname (binder : rho) = body. For enumerable rho the whole
// table is computed, otherwise only the demanded arguments.
FixpointTable fixpoint_letrec(const AlgebraConfig& config, const std::map<std::string, AnswerValue>& env,
                              const std::string& fname, const std::string& binder, const TargetType& rho,
                              const TargetTerm& body, const std::vector<GroundValue>& demanded = {});

// Values of an enumerable ground type; throws EvalError otherwise.
std::vector<GroundValue> enumerate_ground(const TargetType& t, std::optional<std::uint64_t> nat_bound);

enum class Verdict { Holds, Fails, Unknown };
std::string to_string(Verdict v);

struct TraceCheck {
  Verdict verdict = Verdict::Unknown;
  EvalResult result;
  std::vector<std::string> warnings;
};

// q0 in the value with exact status: holds; q0 outside: fails (the
// approximants shrink towards the gfp); otherwise unknown.
TraceCheck check_trace_property(const AlgebraConfig& config, const TargetTerm& formula);

nlohmann::json answer_to_json(const AnswerValue& v, const AlgebraConfig& config);
// {value, status, iterations, error_bound}
nlohmann::json eval_result_to_json(const EvalResult& r, const AlgebraConfig& config);

}  // namespace cpswp
