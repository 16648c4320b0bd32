#pragma once

#include "cpswp/source.hpp"

namespace cpswp {

struct Elaborated {
  SourceTerm term;  // every Op result, Absurd result and letrec type filled in
  SourceType type;
};

// Type inference by unification. Missing annotations are solved for; those
// left unconstrained default to unit. Throws TypeError with the path to the
// offending subterm.
Elaborated elaborate(const Signature& sig, const TypingContext& ctx, const SourceTerm& term);

// ctx |- term : rho. Present annotations are checked, absent ones inferred.
SourceType typecheck(const Signature& sig, const TypingContext& ctx, const SourceTerm& term);

}  // namespace cpswp
