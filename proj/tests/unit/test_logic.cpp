#include "doctest.h"

#include "cpswp/error.hpp"
#include "cpswp/signature.hpp"
#include "cpswp/target.hpp"
#include "json.hpp"

using namespace cpswp;

namespace {
TargetTerm f(const std::string& s) { return parse_target(s, builtin_signature("all")); }
std::string round(const std::string& s) { return pretty_print(f(s)); }
}  // namespace

TEST_CASE("printer and parser agree") {
  for (const char* s : {"\\k. letrec g (x, h) = 0.5 * h () + 0.5 * (1 + g ((), h)) in g ((), k)",
                        "\\k0. k0 (\\(x, k1). k1 x)", "true && false || true => false", "1 + 2 * 3", "(1 + 2) * 3",
                        "forall x:unit + unit. case x of inl a -> true | inr b -> false", "<a>(true)",
                        "flip[0.5]{true, false}", "inf", "a => b => c"}) {
    CAPTURE(s);
    CHECK(round(s) == s);
    CHECK(alpha_equal(f(round(s)), f(s)));
  }
  CHECK(round("(a => b) => c") == "(a => b) => c");
}

TEST_CASE("typed printing round-trips") {
  Signature sig = builtin_signature("all");
  TargetTerm t = f("\\k:unit -> R. letrec g (x, h):unit * (unit -> R) = 0.5 * h () + 0.5 * (1 + g ((), h)) in g ((), k)");
  TargetType ty = typecheck_target(sig, {}, t);
  CHECK(to_string(ty) == "(unit -> R) -> R");
  std::string typed = pretty_print(t, {true, &sig});
  TargetTerm back = parse_target(typed, sig);
  CHECK(alpha_equal(back, t));
  CHECK(target_type_equal(typecheck_target(sig, {}, back), ty));
}

TEST_CASE("target typing rules") {
  Signature sig = builtin_signature("all");
  auto tc = [&](const std::string& s, TargetContext ctx = {}) { return to_string(typecheck_target(sig, ctx, f(s))); };
  CHECK(tc("true && <a>(false)") == "R");
  CHECK(tc("unif{(\\x:real. x * x, ())}") == "R");
  CHECK(tc("\\x:unit + unit. case x of inl a -> true | inr b -> false") == "unit + unit -> R");
  // case and absurd only eliminate into R
  CHECK_THROWS_AS(typecheck_target(sig, {}, f("\\x:unit + unit. case x of inl a -> () | inr b -> ()")), TypeError);
  CHECK(tc("\\x:empty. absurd x") == "empty -> R");
  // modal arguments are (ar -> R) * car
  CHECK_THROWS_AS(typecheck_target(sig, {}, f("tick{(\\x:nat. true, ())}")), TypeError);
  CHECK_THROWS_AS(typecheck_target(sig, {}, f("\\x. x")), TypeError);
  CHECK_THROWS_AS(typecheck_target(sig, {}, f("p")), TypeError);
  CHECK(tc("p && q", {{"p", t_answer()}, {"q", t_answer()}}) == "R");
}

TEST_CASE("substitution avoids capture") {
  TargetTerm t = f("\\y. x");
  TargetTerm r = substitute(t, "x", t_var("y"));
  CHECK(pretty_print(r) == "\\y'. y");
  CHECK(free_vars(r) == std::set<std::string>{"y"});
  CHECK(alpha_equal(substitute(f("\\x. x"), "x", t_var("z")), f("\\x. x")));
}

TEST_CASE("alpha equivalence") {
  CHECK(alpha_equal(f("\\a. a"), f("\\b. b")));
  CHECK_FALSE(alpha_equal(f("\\a. a"), f("\\b. a")));
  CHECK(alpha_equal(f("0.1 + 0.2"), t_bin(BinOp::Add, t_weight(0.1), t_weight(0.2 + 1e-14))));
  CHECK_FALSE(alpha_equal(f("1 + 2"), f("2 + 1")));
}

TEST_CASE("normalization") {
  CHECK(pretty_print(normalize(f("(\\y. x) z"))) == "x");
  CHECK(pretty_print(normalize(f("fst ((), b)"))) == "()");
  CHECK(pretty_print(normalize(f("case inl [unit + unit] () of inl a -> p | inr b -> q"))) == "p");
  CHECK(pretty_print(normalize(f("(\\k. k ()) (\\x. true)"))) == "true");
}

TEST_CASE("json dump is node tagged") {
  auto j = nlohmann::json::parse(target_to_json(f("1 + inf")));
  CHECK(j["node"] == "Add");
  CHECK(j["left"]["node"] == "WeightLit");
  CHECK(j["right"]["value"] == "inf");
}

TEST_CASE("ground embedding") {
  CHECK(is_ground(t_sum(t_unit(), t_base("nat"))));
  CHECK_FALSE(is_ground(t_pred(t_unit())));
  CHECK_THROWS_AS(ground_to_target(arrow_type(unit_type(), unit_type())), TypeError);
}
