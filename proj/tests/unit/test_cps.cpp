#include "doctest.h"

#include "cpswp/cps.hpp"
#include "cpswp/error.hpp"
#include "cpswp/parse.hpp"
#include "cpswp/signature.hpp"
#include "cpswp/target.hpp"

using namespace cpswp;

namespace {
CpsOutput run(const std::string& src, std::string_view inst = "all") {
  Signature sig = builtin_signature(inst);
  return cps_term(sig, parse_program(src, sig));
}
TargetTerm tp(const std::string& s) { return parse_target(s, builtin_signature("all")); }
}  // namespace

TEST_CASE("cps of the identity") {
  CpsOutput out = run("fun x:unit. x");
  CHECK(pretty_print(normalize(out.term)) == "\\k0. k0 (\\(x, k1). k1 x)");
  CHECK(to_string(out.type) == "((unit * (unit -> R) -> R) -> R) -> R");
}

TEST_CASE("cps of the geometric cost loop") {
  CpsOutput out = run("letrec g x = flip[0.5]((), tick(g ())) in g ()", "cost");
  TargetTerm f = normalize(rewrite_cost(out.term));
  CHECK(alpha_equal(f, tp("\\k17. letrec g (x, k0) = 0.5 * k0 () + 0.5 * (1 + g ((), k0)) in g ((), k17)")));
}

TEST_CASE("cps types") {
  CHECK(to_string(cps_type(arrow_type(unit_type(), unit_type()))) == "unit * (unit -> R) -> R");
  CHECK(to_string(cps_type(prod_type(unit_type(), sum_type(unit_type(), empty_type())))) == "unit * (unit + empty)");
  Signature sig = builtin_signature("all");
  for (const char* s : {"()", "fun x:unit. event[a](x)", "letrec f x = f x in f ()",
                        "case flip[0.5](inl [unit + unit] (), inr [unit + unit] ()) of inl a -> () | inr b -> tick(())",
                        "(fun f:unit -> unit. f ()) (fun y:unit. choice(y, y))"}) {
    CAPTURE(s);
    CpsOutput out = run(s);
    TargetType ty = typecheck_target(sig, {}, out.term);
    CHECK(target_type_equal(ty, out.type));
    CHECK(target_type_equal(ty, t_pred(t_pred(cps_type(out.source_type)))));
  }
}

TEST_CASE("instance rewrites") {
  CHECK(pretty_print(normalize(rewrite_trace(tp("choice{p, q}")))) ==
        "p && q");
  CHECK(pretty_print(normalize(rewrite_cost(tp("tick{p}")))) == "1 + p");
  CHECK(pretty_print(normalize(rewrite_cost(tp("flip[0.25]{p, q}")))) == "0.25 * p + 0.75 * q");
  // unif survives the cost rewrite
  TargetTerm u = rewrite_cost(tp("unif{(\\x:real. x, ())}"));
  CHECK(pretty_print(u).rfind("unif", 0) == 0);
}

TEST_CASE("fresh continuation names avoid program names") {
  CpsOutput out = run("fun k0:unit. k0");
  std::string s = pretty_print(normalize(out.term));
  CHECK(s == "\\k1. k1 (\\(k0, k2). k2 k0)");
  CHECK(alpha_equal(normalize(out.term), tp("\\k. k (\\(x, h). h x)")));
}

TEST_CASE("ill-typed input is rejected before translation") {
  Signature sig = builtin_signature("all");
  CHECK_THROWS_AS(cps_term(sig, parse_program("() ()", sig)), TypeError);
  CpsOutput bad = cps_term(sig, parse_program("flip[2]((), ())", sig));
  CHECK_THROWS_AS(rewrite_cost(bad.term), Error);
}
