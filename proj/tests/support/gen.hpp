#pragma once

// Random well-typed source programs for the property tests. Recursion runs
// over a finite sum 1 + ... + 1 and only ever calls itself on the
// predecessor, so every run terminates.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cpswp/source.hpp"

namespace cpswp::testgen {

enum class Instance { Trace, Cost };

inline SourceType bool_type() { return finite_sum_type(2); }

// Element i (1-based) of the n-fold sum.
inline SourceTerm element(int i, int n) {
  if (n == 1) return s_unit();
  if (i == n) return make_source(sterm::Inj{2, finite_sum_type(n), s_unit()});
  return make_source(sterm::Inj{1, finite_sum_type(n), element(i, n - 1)});
}

class ProgramGen {
 public:
  ProgramGen(std::mt19937& rng, Instance inst) : rng_(rng), inst_(inst) {}

  struct Entry {
    std::string name;
    SourceType type;
  };
  // Recursive calls usable as atoms of a given type.
  using Calls = std::vector<std::pair<SourceType, SourceTerm>>;

  SourceType ground_type() {
    switch (pick(5)) {
      case 0:
      case 1:
        return unit_type();
      case 2:
        return bool_type();
      case 3:
        return prod_type(unit_type(), bool_type());
      default:
        return finite_sum_type(3);
    }
  }

  SourceType any_type() {
    if (pick(3) == 0) return arrow_type(ground_type(), ground_type());
    return ground_type();
  }

  SourceTerm program(const SourceType& t, int depth) {
    letrecs_ = 0;
    return gen(t, depth, {}, {});
  }

  SourceTerm gen(const SourceType& t, int depth, const std::vector<Entry>& ctx, const Calls& calls) {
    if (depth <= 0) return leaf(t, ctx, calls);
    switch (pick(10)) {
      case 0:
        return leaf(t, ctx, calls);
      case 1:
      case 2:
        return effect(t, depth, ctx, calls);
      case 3:
        return intro(t, depth, ctx, calls);
      case 4: {
        std::string a = fresh("u"), b = fresh("v");
        auto l = ctx;
        l.push_back({a, unit_type()});
        auto r = ctx;
        r.push_back({b, unit_type()});
        return make_source(sterm::Case{gen(bool_type(), depth - 1, ctx, calls), a, gen(t, depth - 1, l, calls), b,
                                       gen(t, depth - 1, r, calls)});
      }
      case 5: {
        SourceType s = ground_type();
        return s_app(gen(arrow_type(s, t), depth - 1, ctx, calls), gen(s, depth - 1, ctx, calls));
      }
      case 6:
        return make_source(sterm::Proj{1, gen(prod_type(t, unit_type()), depth - 1, ctx, calls)});
      case 7:
      case 8:
        if (depth >= 3 && letrecs_ < 2) return letrec(t, depth, ctx, calls);
        return effect(t, depth, ctx, calls);
      default: {
        // let x = M in N, as an application
        SourceType s = ground_type();
        std::string x = fresh("y");
        auto inner = ctx;
        inner.push_back({x, s});
        return s_app(s_lam(x, s, gen(t, depth - 1, inner, calls)), gen(s, depth - 1, ctx, calls));
      }
    }
  }

 private:
  std::mt19937& rng_;
  Instance inst_;
  int counter_ = 0;
  int letrecs_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
  std::string fresh(const char* p) { return p + std::to_string(counter_++); }

  SourceTerm leaf(const SourceType& t, const std::vector<Entry>& ctx, const Calls& calls) {
    std::vector<SourceTerm> options;
    for (const auto& e : ctx) {
      if (type_equal(e.type, t)) options.push_back(s_var(e.name));
    }
    for (const auto& [ty, call] : calls) {
      if (type_equal(ty, t)) options.push_back(call);
    }
    if (!options.empty() && pick(3) != 0) return options[pick(static_cast<int>(options.size()))];
    return canonical(t, ctx, calls);
  }

  SourceTerm canonical(const SourceType& t, const std::vector<Entry>& ctx, const Calls& calls) {
    if (std::holds_alternative<stype::Unit>(t->node)) return s_unit();
    if (const auto* s = std::get_if<stype::Sum>(&t->node)) {
      int i = pick(2) + 1;
      return make_source(sterm::Inj{i, t, canonical(i == 1 ? s->left : s->right, ctx, calls)});
    }
    if (const auto* p = std::get_if<stype::Prod>(&t->node)) {
      return s_pair(canonical(p->left, ctx, calls), canonical(p->right, ctx, calls));
    }
    const auto& a = std::get<stype::Arrow>(t->node);
    std::string x = fresh("x");
    auto inner = ctx;
    inner.push_back({x, a.from});
    return s_lam(x, a.from, leaf(a.to, inner, calls));
  }

  SourceTerm intro(const SourceType& t, int depth, const std::vector<Entry>& ctx, const Calls& calls) {
    if (const auto* s = std::get_if<stype::Sum>(&t->node)) {
      int i = pick(2) + 1;
      return make_source(sterm::Inj{i, t, gen(i == 1 ? s->left : s->right, depth - 1, ctx, calls)});
    }
    if (const auto* p = std::get_if<stype::Prod>(&t->node)) {
      return s_pair(gen(p->left, depth - 1, ctx, calls), gen(p->right, depth - 1, ctx, calls));
    }
    if (const auto* a = std::get_if<stype::Arrow>(&t->node)) {
      std::string x = fresh("x");
      auto inner = ctx;
      inner.push_back({x, a->from});
      return s_lam(x, a->from, gen(a->to, depth - 1, inner, calls));
    }
    return s_unit();
  }

  // o(M1, ..., Mn) sugar: o(fun x:n. case-chain, ()).
  SourceTerm nary(const std::string& name, const std::string& index, const SourceType& t,
                  const std::vector<SourceTerm>& branches) {
    int n = static_cast<int>(branches.size());
    std::string x = fresh("c");
    SourceTerm body = branches[0];
    if (n == 2) {
      body = make_source(sterm::Case{s_var(x), fresh("w"), branches[0], fresh("w"), branches[1]});
    }
    return make_source(sterm::Op{name, index, t, s_pair(s_lam(x, finite_sum_type(n), body), s_unit())});
  }

  SourceTerm effect(const SourceType& t, int depth, const std::vector<Entry>& ctx, const Calls& calls) {
    bool binary = pick(2) == 0;
    if (inst_ == Instance::Trace) {
      if (binary) return nary("choice", "", t, {gen(t, depth - 1, ctx, calls), gen(t, depth - 1, ctx, calls)});
      return nary("event", pick(2) == 0 ? "a" : "b", t, {gen(t, depth - 1, ctx, calls)});
    }
    if (binary) {
      static const char* const ps[] = {"0.25", "0.5", "0.75"};
      return nary("flip", ps[pick(3)], t, {gen(t, depth - 1, ctx, calls), gen(t, depth - 1, ctx, calls)});
    }
    return nary("tick", "", t, {gen(t, depth - 1, ctx, calls)});
  }

  // true (inl) exactly on the first element
  SourceTerm is_first(const SourceTerm& x, int n) {
    if (n == 1) return make_source(sterm::Inj{1, bool_type(), s_unit()});
    std::string y = fresh("y"), z = fresh("z");
    return make_source(sterm::Case{x, y, is_first(s_var(y), n - 1), z, make_source(sterm::Inj{2, bool_type(), s_unit()})});
  }

  // predecessor, saturating at the first element
  SourceTerm pred(const SourceTerm& x, int n) {
    if (n == 1) return x;
    std::string y = fresh("y"), z = fresh("z");
    SourceType sum = finite_sum_type(n);
    return make_source(sterm::Case{x, y, make_source(sterm::Inj{1, sum, pred(s_var(y), n - 1)}), z,
                                   make_source(sterm::Inj{1, sum, element(n - 1, n - 1)})});
  }

  SourceTerm letrec(const SourceType& t, int depth, const std::vector<Entry>& ctx, const Calls& calls) {
    ++letrecs_;
    int n = 2 + pick(2);
    SourceType fuel = finite_sum_type(n);
    std::string f = fresh("f"), x = fresh("n");
    auto inner = ctx;
    inner.push_back({x, fuel});
    Calls rec = calls;
    rec.emplace_back(t, s_app(s_var(f), pred(s_var(x), n)));
    std::string a = fresh("u"), b = fresh("v");
    SourceTerm body = make_source(sterm::Case{is_first(s_var(x), n), a, gen(t, depth - 2, inner, calls), b,
                                              gen(t, depth - 2, inner, rec)});
    Calls outer = calls;
    outer.emplace_back(t, s_app(s_var(f), element(1 + pick(n), n)));
    SourceTerm rest = gen(t, depth - 1, ctx, outer);
    if (pick(2) == 0) rest = s_app(s_var(f), element(n, n));
    return make_source(sterm::LetRec{f, x, fuel, t, body, rest});
  }
};

}  // namespace cpswp::testgen
