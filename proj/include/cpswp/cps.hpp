#pragma once

#include "cpswp/source.hpp"
#include "cpswp/target.hpp"

namespace cpswp {

// b, 1, 0, products and sums map to themselves;
// (rho -> tau) maps to (rho' * (tau' -> R)) -> R.
TargetType cps_type(const SourceType& t);

struct CpsOutput {
  TargetTerm term;
  TargetType type;  // (rho' -> R) -> R
  SourceType source_type;
};

// Continuation-passing translation into the target logic. The input is
// elaborated first, so parser output can be passed directly. Fresh binders
// are k0, k1, ... skipping names already used by the program.
CpsOutput cps_term(const Signature& sig, const SourceTerm& term);
CpsOutput cps_term(const Signature& sig, const TypingContext& ctx, const SourceTerm& term);

// choice{A, B} becomes A && B.
TargetTerm rewrite_trace(const TargetTerm& term);
// tick{A} becomes 1 + A, flip[p]{A, B} becomes p * A + (1 - p) * B; unif is
// kept.
TargetTerm rewrite_cost(const TargetTerm& term);

}  // namespace cpswp
