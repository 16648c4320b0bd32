#pragma once

// Direct semantics of closed source programs: bounded trace sets for event /
// choice programs and exact discrete cost distributions for flip / tick
// programs. Depth counts letrec body unfoldings along one run.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cpswp/algebra.hpp"
#include "cpswp/dfa.hpp"
#include "cpswp/ground.hpp"
#include "cpswp/source.hpp"
#include "json.hpp"

namespace cpswp {

using Word = std::vector<std::string>;

struct TraceApprox {
  std::set<Word> unterminated;  // prefix closed, contains the empty word
  std::map<Word, std::set<GroundValue, GroundValueLess>> terminated;
  int depth = 0;
  bool complete = true;  // no run was cut
};

struct CostKeyLess {
  bool operator()(const std::pair<std::uint64_t, GroundValue>& a,
                  const std::pair<std::uint64_t, GroundValue>& b) const {
    if (a.first != b.first) return a.first < b.first;
    return compare(a.second, b.second) < 0;
  }
};

struct CostDistribution {
  std::map<std::pair<std::uint64_t, GroundValue>, double, CostKeyLess> mass;
  double truncated_mass = 0;
  int depth = 0;
};

// Throws OracleError for operations outside event/choice.
TraceApprox run_trace(const Signature& sig, const SourceTerm& term, int depth);
// Throws OracleError for unif and operations outside flip/tick.
CostDistribution run_cost(const Signature& sig, const SourceTerm& term, int depth);

// Intersection of pre_s(U) over unterminated s and pre_s(post) over
// terminated s.
StateSet oracle_wp_trace(const TraceApprox& approx, const Dfa& dfa, const StateSet& post);
// Trace(M) within the language of runnable words: holds / fails, or unknown
// when nothing failed but some run was cut.
Verdict oracle_trace_verdict(const TraceApprox& approx, const Dfa& dfa);

struct EctBound {
  double lower = 0;
  double upper_gap = 0;  // +inf when unbounded
  bool bounded = true;
};

// Without a per-run cost bound for the cut runs, any truncated mass makes
// the gap unbounded.
EctBound oracle_ect(const CostDistribution& dist, std::optional<double> cut_cost_bound = std::nullopt);
WeightVector oracle_moments(const CostDistribution& dist, int n);

nlohmann::json trace_approx_to_json(const TraceApprox& a);
nlohmann::json cost_distribution_to_json(const CostDistribution& d);

}  // namespace cpswp
