#include "doctest.h"

#include "cpswp/error.hpp"
#include "cpswp/ground.hpp"
#include "cpswp/parse.hpp"
#include "cpswp/signature.hpp"
#include "cpswp/typecheck.hpp"

using namespace cpswp;

namespace {
Signature all() { return builtin_signature("all"); }
std::string type_of(const std::string& src) {
  Signature sig = all();
  return to_string(typecheck(sig, {}, parse_program(src, sig)));
}
}  // namespace

TEST_CASE("parser keeps sugar and renames shadowing binders") {
  Signature sig = all();
  CHECK(print_source(parse_program("choice((), event[b](()))", sig)) == "choice((), event[b](()))");
  CHECK(print_source(parse_program("fun x:unit. fun x:unit. x", sig)) == "fun x:unit. fun x_1:unit. x_1");
  CHECK(print_source(parse_program("letrec g x = flip[0.5]((), tick(g ())) in g ()", sig)) ==
        "letrec g x = flip[0.5]((), tick(g ())) in g ()");
}

TEST_CASE("n-ary sugar desugars to a case split over 1 + 1") {
  Signature sig = all();
  SourceTerm t = parse_program("choice(inl [unit + unit] (), inr [unit + unit] ())", sig);
  const auto* op = std::get_if<sterm::Op>(&t->node);
  REQUIRE(op);
  std::vector<SourceTerm> branches;
  REQUIRE(match_nary_sugar(op->arg, branches));
  CHECK(branches.size() == 2);
}

TEST_CASE("parse errors carry positions") {
  Signature sig = all();
  CHECK_THROWS_AS(parse_program("y", sig), SyntaxError);
  CHECK_THROWS_AS(parse_program("tick((), ())", sig), SyntaxError);
  CHECK_THROWS_AS(parse_program("fun x:unit.", sig), SyntaxError);
  try {
    parse_program("()\n  )", sig);
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK_NOTHROW(parse_program("y", sig, {"y"}));
}

TEST_CASE("typing") {
  CHECK(type_of("fun x:unit. x") == "unit -> unit");
  CHECK(type_of("event[a](())") == "unit");
  CHECK(type_of("(fst ((), zero ()), snd ((), zero ()))") == "unit * nat");
  CHECK(type_of("letrec f x = f x in f ()") == "unit");
  CHECK(type_of("case inl [unit + nat] () of inl a -> zero () | inr b -> succ b") == "nat");
  CHECK(type_of("unif((fun r:real. tick(()), ()))") == "unit");
  Signature sig = all();
  CHECK_THROWS_AS(typecheck(sig, {}, parse_program("() ()", sig)), TypeError);
  CHECK_THROWS_AS(typecheck(sig, {}, parse_program("succ ()", sig)), TypeError);
  try {
    typecheck(sig, {}, parse_program("fun x:unit. x x", sig));
    FAIL("expected a type error");
  } catch (const TypeError& e) {
    CHECK(std::string(e.what()).find("fun x/app") != std::string::npos);
  }
}

TEST_CASE("elaboration fills operation result types") {
  Signature sig = all();
  Elaborated e = elaborate(sig, {}, parse_program("flip[0.25](zero (), succ (zero ()))", sig));
  const auto* op = std::get_if<sterm::Op>(&e.term->node);
  REQUIRE(op);
  REQUIRE(op->result);
  CHECK(to_string(op->result) == "nat");
}

TEST_CASE("signature validation") {
  CHECK(validate_signature(builtin_signature("trace")).ok);
  CHECK(validate_signature(builtin_signature("cost")).ok);
  Signature bad = parse_signature_json(R"({"base_types":["nat"],
    "constants":{"iszero":{"ar":"nat","car":"unit + unit"}, "zero":{"ar":"unit","car":"nat"}},
    "operations":{}})");
  SignatureReport r = validate_signature(bad);
  CHECK_FALSE(r.ok);
  REQUIRE(r.offending_constants.size() == 1);
  CHECK(r.offending_constants[0] == "iszero");
  CHECK_THROWS_AS(parse_signature_json(R"({"operations":{"o":{"ar":"unit","car":"unit","nary":2}}})"), SignatureError);
  CHECK_THROWS_AS(parse_signature_json("[1, 2]"), SignatureError);
  Signature round = parse_signature_json(signature_to_json(builtin_signature("all")));
  CHECK(round.operations.size() == builtin_signature("all").operations.size());
  CHECK(validate_signature(round).ok);
}

TEST_CASE("constant denotations") {
  CHECK(compare(apply_constant("add", g_pair(g_nat(2), g_nat(3))), g_nat(5)) == 0);
  CHECK(compare(apply_constant("pred", g_nat(0)), g_nat(0)) == 0);
  CHECK(compare(apply_constant("iszero", g_nat(0)), g_inj(1, g_unit())) == 0);
  CHECK(compare(apply_constant("iszero", g_nat(4)), g_inj(2, g_unit())) == 0);
  CHECK_THROWS_AS(apply_constant("nope", g_unit()), EvalError);
  CHECK_THROWS_AS(apply_constant("succ", g_unit()), EvalError);
}
