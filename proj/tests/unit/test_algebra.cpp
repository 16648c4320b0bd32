#include "doctest.h"

#include <cmath>

#include "cpswp/algebra.hpp"
#include "cpswp/dfa.hpp"
#include "cpswp/error.hpp"
#include "cpswp/signature.hpp"
#include "cpswp/target.hpp"

using namespace cpswp;

namespace {
TargetTerm tp(const std::string& s) { return parse_target(s, builtin_signature("all")); }

std::shared_ptr<const Dfa> a_star() {
  return std::make_shared<const Dfa>(parse_automaton_json(R"({"states":["q0","q1"],"alphabet":["a","b"],
    "transitions":[{"from":"q0","symbol":"a","to":"q0"},{"from":"q0","symbol":"b","to":"q1"}],
    "initial":"q0","finals":["q0","q1"]})"));
}

AlgebraConfig cfg(AlgebraKind k, std::shared_ptr<const Dfa> d = nullptr) {
  AlgebraConfig c;
  c.kind = k;
  c.dfa = std::move(d);
  if (k == AlgebraKind::Moments) c.moment_order = 2;
  return c;
}

double cost(const std::string& s, AlgebraConfig c = cfg(AlgebraKind::Cost)) {
  return std::get<double>(evaluate(c, tp(s)).value);
}
}  // namespace

TEST_CASE("cost algebra") {
  CHECK(cost("1 + 0.5 * 4") == doctest::Approx(3.0));
  CHECK(evaluate(cfg(AlgebraKind::Cost), tp("1 + 0.5 * 4")).status == EvalStatus::Exact);
  CHECK(std::isinf(cost("inf + 1")));
  CHECK(cost("0 * inf") == 0.0);
  EvalResult r = evaluate(cfg(AlgebraKind::Cost), tp("letrec f x = f x in f ()"));
  CHECK(std::get<double>(r.value) == 0.0);
  CHECK(r.status == EvalStatus::Exact);
  EvalResult g = evaluate(cfg(AlgebraKind::Cost), tp("letrec g (x, k) = 0.5 * k () + 0.5 * (1 + g ((), k)) in g ((), \\x. 0)"));
  CHECK(std::get<double>(g.value) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(g.status == EvalStatus::Converged);
}

TEST_CASE("unif uses the midpoint rule") {
  EvalResult r = evaluate(cfg(AlgebraKind::Cost), tp("unif{(\\x:real. x * x, ())}"));
  CHECK(std::get<double>(r.value) == doctest::Approx(1.0 / 3).epsilon(1e-6));
  CHECK(r.status == EvalStatus::Converged);
}

TEST_CASE("moments") {
  CHECK(elapse({1, 3}, 0) == WeightVector{1, 3});
  CHECK(elapse({0, 0}, 2) == WeightVector{2, 4});
  CHECK(elapse({1, 1}, 1) == WeightVector{2, 4});
  CHECK(weight_powers(3, 3) == WeightVector{3, 9, 27});
  EvalResult r = evaluate(cfg(AlgebraKind::Moments),
                          tp("letrec g (x, k) = 0.5 * k () + 0.5 * (1 + g ((), k)) in g ((), \\x. 0)"));
  auto v = std::get<WeightVector>(r.value);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(v[1] == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("trace algebra") {
  auto d = a_star();
  AlgebraConfig c = cfg(AlgebraKind::Trace, d);
  CHECK(std::get<StateSet>(evaluate(c, tp("true")).value) == d->universe());
  StateSet only_q0(2);
  only_q0.insert(0);
  CHECK(trace_event(*d, "a", d->universe()) == only_q0);
  CHECK(trace_event(*d, "b", only_q0).count() == 0);
  CHECK(trace_meet(only_q0, d->universe()) == only_q0);
  CHECK_THROWS_AS(d->symbol("c"), EvalError);
  CHECK(std::get<StateSet>(evaluate(c, tp("<a>(true) && <b>(true)")).value) == only_q0);
}

TEST_CASE("trace verdicts") {
  auto d = a_star();
  AlgebraConfig c = cfg(AlgebraKind::Trace, d);
  CHECK(check_trace_property(c, tp("letrec f x = <a>(f x) in f ()")).verdict == Verdict::Holds);
  CHECK(check_trace_property(c, tp("<b>(<a>(true))")).verdict == Verdict::Fails);
  AlgebraConfig small = c;
  small.max_unfold = 50;
  small.nat_bound = std::nullopt;
  TraceCheck u = check_trace_property(small, tp("letrec f n:nat = <a>(f (succ n)) in f (zero ())"));
  CHECK(u.verdict == Verdict::Unknown);
  CHECK(u.result.status == EvalStatus::Truncated);
}

TEST_CASE("quantifiers") {
  AlgebraConfig c = cfg(AlgebraKind::Trace, a_star());
  CHECK(check_trace_property(c, tp("forall x:unit + unit. case x of inl a -> true | inr b -> <b>(<b>(true))")).verdict ==
        Verdict::Fails);
  CHECK_THROWS_AS(evaluate(c, tp("forall n:nat. true")), EvalError);
  c.nat_bound = 4;
  CHECK_NOTHROW(evaluate(c, tp("forall n:nat. true")));
  CHECK_THROWS_AS(evaluate(cfg(AlgebraKind::Cost), tp("forall x:unit. 1")), EvalError);
}

TEST_CASE("unsupported nodes and bad settings") {
  CHECK_THROWS_AS(evaluate(cfg(AlgebraKind::Cost), tp("<a>(1)")), EvalError);
  CHECK_THROWS_AS(evaluate(cfg(AlgebraKind::Trace, a_star()), tp("1 + 1")), EvalError);
  CHECK_THROWS_AS(cfg(AlgebraKind::Trace).validate(), Error);
  AlgebraConfig c = cfg(AlgebraKind::Cost);
  c.epsilon = -1;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("ground enumeration") {
  CHECK(enumerate_ground(t_sum(t_unit(), t_prod(t_unit(), t_sum(t_unit(), t_unit()))), std::nullopt).size() == 3);
  CHECK_THROWS_AS(enumerate_ground(t_base("nat"), std::nullopt), EvalError);
  CHECK(enumerate_ground(t_base("nat"), 5).size() == 5);
}

TEST_CASE("fixpoint tables") {
  AlgebraConfig c = cfg(AlgebraKind::Cost);
  TargetType b = t_sum(t_unit(), t_unit());
  FixpointTable t = fixpoint_letrec(c, {}, "f", "x", b, tp("case x of inl u -> 1 | inr v -> 1 + f (inl [unit + unit] ())"));
  REQUIRE(t.entries.size() == 2);
  for (const auto& [arg, val] : t.entries) {
    double want = compare(arg, g_inj(1, g_unit())) == 0 ? 1.0 : 2.0;
    CHECK(std::get<double>(val) == want);
  }
  CHECK(t.status == EvalStatus::Exact);
}
