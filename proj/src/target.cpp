#include "cpswp/target.hpp"

#include <cmath>
#include <functional>

#include "cpswp/error.hpp"
#include "json.hpp"

namespace cpswp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

TargetType make_ttype(decltype(TargetTypeNode::node) n) {
  return std::make_shared<const TargetTypeNode>(TargetTypeNode{std::move(n)});
}

}  // namespace

TargetType t_answer() {
  static const TargetType t = make_ttype(ttype::Answer{});
  return t;
}
TargetType t_base(std::string name) { return make_ttype(ttype::Base{std::move(name)}); }
TargetType t_unit() {
  static const TargetType t = make_ttype(ttype::Unit{});
  return t;
}
TargetType t_empty() {
  static const TargetType t = make_ttype(ttype::Empty{});
  return t;
}
TargetType t_prod(TargetType l, TargetType r) { return make_ttype(ttype::Prod{std::move(l), std::move(r)}); }
TargetType t_sum(TargetType l, TargetType r) { return make_ttype(ttype::Sum{std::move(l), std::move(r)}); }
TargetType t_pred(TargetType arg) { return make_ttype(ttype::Pred{std::move(arg)}); }

bool target_type_equal(const TargetType& a, const TargetType& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  return std::visit(overloaded{
                        [&](const ttype::Base& x) { return x.name == std::get<ttype::Base>(b->node).name; },
                        [&](const ttype::Prod& x) {
                          const auto& y = std::get<ttype::Prod>(b->node);
                          return target_type_equal(x.left, y.left) && target_type_equal(x.right, y.right);
                        },
                        [&](const ttype::Sum& x) {
                          const auto& y = std::get<ttype::Sum>(b->node);
                          return target_type_equal(x.left, y.left) && target_type_equal(x.right, y.right);
                        },
                        [&](const ttype::Pred& x) { return target_type_equal(x.arg, std::get<ttype::Pred>(b->node).arg); },
                        [](const auto&) { return true; },
                    },
                    a->node);
}

bool is_answer(const TargetType& t) { return std::holds_alternative<ttype::Answer>(t->node); }

bool is_ground(const TargetType& t) {
  return std::visit(overloaded{
                        [](const ttype::Answer&) { return false; },
                        [](const ttype::Pred&) { return false; },
                        [](const ttype::Prod& p) { return is_ground(p.left) && is_ground(p.right); },
                        [](const ttype::Sum& s) { return is_ground(s.left) && is_ground(s.right); },
                        [](const auto&) { return true; },
                    },
                    t->node);
}

TargetType ground_to_target(const SourceType& t) {
  return std::visit(overloaded{
                        [](const stype::Base& b) { return t_base(b.name); },
                        [](const stype::Unit&) { return t_unit(); },
                        [](const stype::Empty&) { return t_empty(); },
                        [](const stype::Prod& p) { return t_prod(ground_to_target(p.left), ground_to_target(p.right)); },
                        [](const stype::Sum& s) { return t_sum(ground_to_target(s.left), ground_to_target(s.right)); },
                        [&](const stype::Arrow&) -> TargetType {
                          throw TypeError("expected a ground type, found " + to_string(t));
                        },
                    },
                    t->node);
}

SourceType target_to_ground(const TargetType& t) {
  return std::visit(overloaded{
                        [](const ttype::Base& b) { return base_type(b.name); },
                        [](const ttype::Unit&) { return unit_type(); },
                        [](const ttype::Empty&) { return empty_type(); },
                        [](const ttype::Prod& p) { return prod_type(target_to_ground(p.left), target_to_ground(p.right)); },
                        [](const ttype::Sum& s) { return sum_type(target_to_ground(s.left), target_to_ground(s.right)); },
                        [&](const auto&) -> SourceType {
                          throw TypeError("expected a ground type, found " + to_string(t));
                        },
                    },
                    t->node);
}

namespace {

void print_ttype(std::string& out, const TargetType& t, int level) {
  auto open = [&](int mine) {
    if (level > mine) out += "(";
  };
  auto close = [&](int mine) {
    if (level > mine) out += ")";
  };
  std::visit(overloaded{
                 [&](const ttype::Answer&) { out += "R"; },
                 [&](const ttype::Base& b) { out += b.name; },
                 [&](const ttype::Unit&) { out += "unit"; },
                 [&](const ttype::Empty&) { out += "empty"; },
                 [&](const ttype::Pred& p) {
                   open(0);
                   print_ttype(out, p.arg, 1);
                   out += " -> R";
                   close(0);
                 },
                 [&](const ttype::Sum& s) {
                   open(1);
                   print_ttype(out, s.left, 1);
                   out += " + ";
                   print_ttype(out, s.right, 2);
                   close(1);
                 },
                 [&](const ttype::Prod& p) {
                   open(2);
                   print_ttype(out, p.left, 2);
                   out += " * ";
                   print_ttype(out, p.right, 3);
                   close(2);
                 },
             },
             t->node);
}

}  // namespace

std::string to_string(const TargetType& t) {
  if (!t) return "?";
  std::string out;
  print_ttype(out, t, 0);
  return out;
}

TargetTerm t_var(std::string name) { return make_target(tterm::Var{std::move(name)}); }
TargetTerm t_unitval() {
  static const TargetTerm t = make_target(tterm::UnitVal{});
  return t;
}
TargetTerm t_pair(TargetTerm a, TargetTerm b) { return make_target(tterm::Pair{std::move(a), std::move(b)}); }
TargetTerm t_proj(int index, TargetTerm arg) { return make_target(tterm::Proj{index, std::move(arg)}); }
TargetTerm t_lam(std::string binder, TargetType type, TargetTerm body, PairHint hint) {
  return make_target(tterm::Lam{std::move(binder), std::move(type), std::move(body), std::move(hint)});
}
TargetTerm t_app(TargetTerm fn, TargetTerm arg) { return make_target(tterm::App{std::move(fn), std::move(arg)}); }
TargetTerm t_true() {
  static const TargetTerm t = make_target(tterm::BoolLit{true});
  return t;
}
TargetTerm t_false() {
  static const TargetTerm t = make_target(tterm::BoolLit{false});
  return t;
}
TargetTerm t_bin(BinOp op, TargetTerm l, TargetTerm r) {
  return make_target(tterm::Binary{op, std::move(l), std::move(r)});
}
TargetTerm t_weight(double w) { return make_target(tterm::WeightLit{w}); }

// ---------------------------------------------------------------- typing

namespace {

bool contains_answer(const TargetType& t) {
  return std::visit(overloaded{
                        [](const ttype::Answer&) { return true; },
                        [](const ttype::Pred& p) { return contains_answer(p.arg); },
                        [](const ttype::Prod& p) { return contains_answer(p.left) || contains_answer(p.right); },
                        [](const ttype::Sum& s) { return contains_answer(s.left) || contains_answer(s.right); },
                        [](const auto&) { return false; },
                    },
                    t->node);
}

bool is_real(const TargetType& t) {
  const auto* b = std::get_if<ttype::Base>(&t->node);
  return b && b->name == "real";
}

class TargetChecker {
 public:
  explicit TargetChecker(const Signature& sig) : sig_(sig) {}

  TargetType check(const TargetTerm& t, TargetContext& ctx) {
    return std::visit(
        overloaded{
            [&](const tterm::Var& v) -> TargetType {
              for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
                if (it->first == v.name) return it->second;
              }
              throw TypeError("unbound variable '" + v.name + "'");
            },
            [&](const tterm::Const& c) -> TargetType {
              const ConstantDecl* d = sig_.find_constant(c.name);
              if (!d) throw TypeError("unknown constant '" + c.name + "'");
              expect(ground_to_target(d->arity), check(c.arg, ctx), "argument of " + c.name);
              return ground_to_target(d->coarity);
            },
            [&](const tterm::Modal& m) -> TargetType {
              const OperationDecl* d = sig_.find_operation(m.name, m.index);
              if (!d) throw TypeError("unknown operation '" + operation_key(m.name, m.index) + "'");
              TargetType want = t_prod(t_pred(ground_to_target(d->arity)), ground_to_target(d->coarity));
              expect(want, check(m.arg, ctx), "argument of modal " + operation_key(m.name, m.index));
              return t_answer();
            },
            [&](const tterm::UnitVal&) -> TargetType { return t_unit(); },
            [&](const tterm::Pair& p) -> TargetType {
              TargetType a = value(check(p.first, ctx), "pair component");
              TargetType b = value(check(p.second, ctx), "pair component");
              return t_prod(a, b);
            },
            [&](const tterm::Proj& p) -> TargetType {
              TargetType a = check(p.arg, ctx);
              const auto* prod = std::get_if<ttype::Prod>(&a->node);
              if (!prod) throw TypeError("projection from non-product " + to_string(a));
              return p.index == 1 ? prod->left : prod->right;
            },
            [&](const tterm::Absurd& a) -> TargetType {
              expect(t_empty(), check(a.arg, ctx), "absurd");
              return t_answer();
            },
            [&](const tterm::Inj& i) -> TargetType {
              well_formed(i.sum);
              const auto* s = std::get_if<ttype::Sum>(&i.sum->node);
              if (!s) throw TypeError("injection into non-sum " + to_string(i.sum));
              expect(i.index == 1 ? s->left : s->right, check(i.arg, ctx), "injection payload");
              return i.sum;
            },
            [&](const tterm::Case& c) -> TargetType {
              TargetType st = check(c.scrutinee, ctx);
              const auto* s = std::get_if<ttype::Sum>(&st->node);
              if (!s) throw TypeError("case on non-sum " + to_string(st));
              ctx.emplace_back(c.left_binder, s->left);
              expect(t_answer(), check(c.left, ctx), "case branch");
              ctx.back() = {c.right_binder, s->right};
              expect(t_answer(), check(c.right, ctx), "case branch");
              ctx.pop_back();
              return t_answer();
            },
            [&](const tterm::Lam& l) -> TargetType {
              if (!l.type) throw TypeError("lambda binder '" + l.binder + "' has no type annotation");
              well_formed(l.type);
              ctx.emplace_back(l.binder, l.type);
              expect(t_answer(), check(l.body, ctx), "lambda body (arrows end in R)");
              ctx.pop_back();
              return t_pred(l.type);
            },
            [&](const tterm::App& a) -> TargetType {
              TargetType f = check(a.fn, ctx);
              const auto* p = std::get_if<ttype::Pred>(&f->node);
              if (!p) throw TypeError("application of non-predicate of type " + to_string(f));
              expect(p->arg, check(a.arg, ctx), "application argument");
              return t_answer();
            },
            [&](const tterm::LetRecPred& lr) -> TargetType {
              if (!lr.arg_type) throw TypeError("letrec binder '" + lr.binder + "' has no type annotation");
              well_formed(lr.arg_type);
              ctx.emplace_back(lr.fname, t_pred(lr.arg_type));
              ctx.emplace_back(lr.binder, lr.arg_type);
              expect(t_answer(), check(lr.body, ctx), "letrec body");
              ctx.pop_back();
              TargetType out = check(lr.rest, ctx);
              ctx.pop_back();
              return out;
            },
            [&](const tterm::BoolLit&) -> TargetType { return t_answer(); },
            [&](const tterm::Binary& b) -> TargetType {
              const bool arith = b.op == BinOp::Add || b.op == BinOp::Mul;
              for (const TargetTerm* side : {&b.left, &b.right}) {
                TargetType st = check(*side, ctx);
                if (is_answer(st) || (arith && is_real(st))) continue;
                throw TypeError(std::string(arith ? "weight operand" : "connective operand") +
                                " must have type R, found " + to_string(st));
              }
              return t_answer();
            },
            [&](const tterm::Quant& q) -> TargetType {
              if (!q.type) throw TypeError("quantifier binder '" + q.binder + "' has no type annotation");
              well_formed(q.type);
              ctx.emplace_back(q.binder, q.type);
              expect(t_answer(), check(q.body, ctx), "quantifier body");
              ctx.pop_back();
              return t_answer();
            },
            [&](const tterm::WeightLit& w) -> TargetType {
              if (!(w.value >= 0)) throw TypeError("weights are nonnegative");
              return t_answer();
            },
        },
        t->node);
  }

 private:
  void expect(const TargetType& want, const TargetType& got, const std::string& where) {
    if (!target_type_equal(want, got)) {
      throw TypeError("type mismatch in " + where + ": expected " + to_string(want) + ", found " + to_string(got));
    }
  }
  TargetType value(const TargetType& t, const std::string& where) {
    if (contains_answer(t)) throw TypeError(where + " cannot have type R");
    return t;
  }
  void well_formed(const TargetType& t) {
    if (contains_answer(t)) throw TypeError("R may only appear as the codomain of an arrow, found " + to_string(t));
  }

  const Signature& sig_;
};

}  // namespace

TargetType typecheck_target(const Signature& sig, const TargetContext& ctx, const TargetTerm& term) {
  TargetContext local = ctx;
  return TargetChecker(sig).check(term, local);
}

// ---------------------------------------------------------------- variables

namespace {

void collect_free(const TargetTerm& t, std::vector<std::string>& bound, std::set<std::string>& out) {
  auto is_bound = [&](const std::string& n) {
    for (const auto& b : bound) {
      if (b == n) return true;
    }
    return false;
  };
  auto under = [&](std::initializer_list<std::string> names, const TargetTerm& body) {
    for (const auto& n : names) bound.push_back(n);
    collect_free(body, bound, out);
    bound.resize(bound.size() - names.size());
  };
  std::visit(overloaded{
                 [&](const tterm::Var& v) {
                   if (!is_bound(v.name)) out.insert(v.name);
                 },
                 [&](const tterm::Const& c) { collect_free(c.arg, bound, out); },
                 [&](const tterm::Modal& m) { collect_free(m.arg, bound, out); },
                 [&](const tterm::Pair& p) {
                   collect_free(p.first, bound, out);
                   collect_free(p.second, bound, out);
                 },
                 [&](const tterm::Proj& p) { collect_free(p.arg, bound, out); },
                 [&](const tterm::Absurd& a) { collect_free(a.arg, bound, out); },
                 [&](const tterm::Inj& i) { collect_free(i.arg, bound, out); },
                 [&](const tterm::Case& c) {
                   collect_free(c.scrutinee, bound, out);
                   under({c.left_binder}, c.left);
                   under({c.right_binder}, c.right);
                 },
                 [&](const tterm::Lam& l) { under({l.binder}, l.body); },
                 [&](const tterm::App& a) {
                   collect_free(a.fn, bound, out);
                   collect_free(a.arg, bound, out);
                 },
                 [&](const tterm::LetRecPred& lr) {
                   under({lr.fname, lr.binder}, lr.body);
                   under({lr.fname}, lr.rest);
                 },
                 [&](const tterm::Binary& b) {
                   collect_free(b.left, bound, out);
                   collect_free(b.right, bound, out);
                 },
                 [&](const tterm::Quant& q) { under({q.binder}, q.body); },
                 [](const auto&) {},
             },
             t->node);
}

void collect_names(const TargetTerm& t, std::set<std::string>& out) {
  std::visit(overloaded{
                 [&](const tterm::Var& v) { out.insert(v.name); },
                 [&](const tterm::Const& c) { collect_names(c.arg, out); },
                 [&](const tterm::Modal& m) { collect_names(m.arg, out); },
                 [&](const tterm::Pair& p) {
                   collect_names(p.first, out);
                   collect_names(p.second, out);
                 },
                 [&](const tterm::Proj& p) { collect_names(p.arg, out); },
                 [&](const tterm::Absurd& a) { collect_names(a.arg, out); },
                 [&](const tterm::Inj& i) { collect_names(i.arg, out); },
                 [&](const tterm::Case& c) {
                   out.insert({c.left_binder, c.right_binder});
                   collect_names(c.scrutinee, out);
                   collect_names(c.left, out);
                   collect_names(c.right, out);
                 },
                 [&](const tterm::Lam& l) {
                   out.insert(l.binder);
                   collect_names(l.body, out);
                 },
                 [&](const tterm::App& a) {
                   collect_names(a.fn, out);
                   collect_names(a.arg, out);
                 },
                 [&](const tterm::LetRecPred& lr) {
                   out.insert({lr.fname, lr.binder});
                   collect_names(lr.body, out);
                   collect_names(lr.rest, out);
                 },
                 [&](const tterm::Binary& b) {
                   collect_names(b.left, out);
                   collect_names(b.right, out);
                 },
                 [&](const tterm::Quant& q) {
                   out.insert(q.binder);
                   collect_names(q.body, out);
                 },
                 [](const auto&) {},
             },
             t->node);
}

}  // namespace

std::set<std::string> free_vars(const TargetTerm& term) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(term, bound, out);
  return out;
}

std::set<std::string> all_target_names(const TargetTerm& term) {
  std::set<std::string> out;
  collect_names(term, out);
  return out;
}

namespace {

class Substituter {
 public:
  Substituter(std::string var, TargetTerm value) : var_(std::move(var)), value_(std::move(value)) {
    fv_ = free_vars(value_);
  }

  TargetTerm run(const TargetTerm& t) {
    return std::visit(
        overloaded{
            [&](const tterm::Var& v) { return v.name == var_ ? value_ : t; },
            [&](const tterm::Const& c) { return make_target(tterm::Const{c.name, run(c.arg)}); },
            [&](const tterm::Modal& m) { return make_target(tterm::Modal{m.name, m.index, run(m.arg)}); },
            [&](const tterm::Pair& p) { return t_pair(run(p.first), run(p.second)); },
            [&](const tterm::Proj& p) { return t_proj(p.index, run(p.arg)); },
            [&](const tterm::Absurd& a) { return make_target(tterm::Absurd{run(a.arg)}); },
            [&](const tterm::Inj& i) { return make_target(tterm::Inj{i.index, i.sum, run(i.arg)}); },
            [&](const tterm::Case& c) {
              auto [lb, left] = under(c.left_binder, c.left);
              auto [rb, right] = under(c.right_binder, c.right);
              return make_target(tterm::Case{run(c.scrutinee), lb, left, rb, right});
            },
            [&](const tterm::Lam& l) {
              auto [b, body] = under(l.binder, l.body);
              return t_lam(b, l.type, body, l.hint);
            },
            [&](const tterm::App& a) { return t_app(run(a.fn), run(a.arg)); },
            [&](const tterm::LetRecPred& lr) {
              if (lr.fname == var_) return t;
              std::string f = lr.fname;
              TargetTerm body = lr.body, rest = lr.rest;
              if (fv_.count(f)) {
                f = fresh(f, {body, rest});
                body = substitute(body, lr.fname, t_var(f));
                rest = substitute(rest, lr.fname, t_var(f));
              }
              auto [x, new_body] = under(lr.binder, body);
              return make_target(tterm::LetRecPred{f, x, lr.arg_type, new_body, run(rest), lr.hint});
            },
            [&](const tterm::Binary& b) { return t_bin(b.op, run(b.left), run(b.right)); },
            [&](const tterm::Quant& q) {
              auto [b, body] = under(q.binder, q.body);
              return make_target(tterm::Quant{q.exists, b, q.type, body});
            },
            [&](const auto&) { return t; },
        },
        t->node);
  }

 private:
  std::string fresh(const std::string& base, std::initializer_list<TargetTerm> scope) {
    std::set<std::string> avoid = fv_;
    avoid.insert(var_);
    for (const auto& s : scope) {
      auto names = all_target_names(s);
      avoid.insert(names.begin(), names.end());
    }
    std::string n = base;
    do {
      n += "'";
    } while (avoid.count(n));
    return n;
  }

  std::pair<std::string, TargetTerm> under(const std::string& binder, const TargetTerm& body) {
    if (binder == var_) return {binder, body};
    if (!fv_.count(binder)) return {binder, run(body)};
    std::string b = fresh(binder, {body});
    return {b, run(substitute(body, binder, t_var(b)))};
  }

  std::string var_;
  TargetTerm value_;
  std::set<std::string> fv_;
};

}  // namespace

TargetTerm substitute(const TargetTerm& term, const std::string& var, const TargetTerm& value) {
  return Substituter(var, value).run(term);
}

// ---------------------------------------------------------------- alpha

namespace {

using AlphaScope = std::vector<std::pair<std::string, std::string>>;

bool same_var(const AlphaScope& scope, const std::string& a, const std::string& b) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    if (it->first == a || it->second == b) return it->first == a && it->second == b;
  }
  return a == b;
}

bool opt_equal(const TargetType& a, const TargetType& b) { return !a || !b || target_type_equal(a, b); }

bool alpha(const TargetTerm& a, const TargetTerm& b, AlphaScope& scope) {
  if (a->node.index() != b->node.index()) return false;
  auto under = [&](std::initializer_list<std::pair<std::string, std::string>> binds, const TargetTerm& x,
                   const TargetTerm& y) {
    for (const auto& p : binds) scope.push_back(p);
    bool r = alpha(x, y, scope);
    scope.resize(scope.size() - binds.size());
    return r;
  };
  return std::visit(
      overloaded{
          [&](const tterm::Var& x) { return same_var(scope, x.name, std::get<tterm::Var>(b->node).name); },
          [&](const tterm::Const& x) {
            const auto& y = std::get<tterm::Const>(b->node);
            return x.name == y.name && alpha(x.arg, y.arg, scope);
          },
          [&](const tterm::Modal& x) {
            const auto& y = std::get<tterm::Modal>(b->node);
            return x.name == y.name && x.index == y.index && alpha(x.arg, y.arg, scope);
          },
          [&](const tterm::UnitVal&) { return true; },
          [&](const tterm::Pair& x) {
            const auto& y = std::get<tterm::Pair>(b->node);
            return alpha(x.first, y.first, scope) && alpha(x.second, y.second, scope);
          },
          [&](const tterm::Proj& x) {
            const auto& y = std::get<tterm::Proj>(b->node);
            return x.index == y.index && alpha(x.arg, y.arg, scope);
          },
          [&](const tterm::Absurd& x) { return alpha(x.arg, std::get<tterm::Absurd>(b->node).arg, scope); },
          [&](const tterm::Inj& x) {
            const auto& y = std::get<tterm::Inj>(b->node);
            return x.index == y.index && opt_equal(x.sum, y.sum) && alpha(x.arg, y.arg, scope);
          },
          [&](const tterm::Case& x) {
            const auto& y = std::get<tterm::Case>(b->node);
            return alpha(x.scrutinee, y.scrutinee, scope) && under({{x.left_binder, y.left_binder}}, x.left, y.left) &&
                   under({{x.right_binder, y.right_binder}}, x.right, y.right);
          },
          [&](const tterm::Lam& x) {
            const auto& y = std::get<tterm::Lam>(b->node);
            return opt_equal(x.type, y.type) && under({{x.binder, y.binder}}, x.body, y.body);
          },
          [&](const tterm::App& x) {
            const auto& y = std::get<tterm::App>(b->node);
            return alpha(x.fn, y.fn, scope) && alpha(x.arg, y.arg, scope);
          },
          [&](const tterm::LetRecPred& x) {
            const auto& y = std::get<tterm::LetRecPred>(b->node);
            return opt_equal(x.arg_type, y.arg_type) &&
                   under({{x.fname, y.fname}, {x.binder, y.binder}}, x.body, y.body) &&
                   under({{x.fname, y.fname}}, x.rest, y.rest);
          },
          [&](const tterm::BoolLit& x) { return x.value == std::get<tterm::BoolLit>(b->node).value; },
          [&](const tterm::Binary& x) {
            const auto& y = std::get<tterm::Binary>(b->node);
            return x.op == y.op && alpha(x.left, y.left, scope) && alpha(x.right, y.right, scope);
          },
          [&](const tterm::Quant& x) {
            const auto& y = std::get<tterm::Quant>(b->node);
            return x.exists == y.exists && opt_equal(x.type, y.type) && under({{x.binder, y.binder}}, x.body, y.body);
          },
          [&](const tterm::WeightLit& x) {
            double v = std::get<tterm::WeightLit>(b->node).value;
            if (std::isinf(x.value) || std::isinf(v)) return x.value == v;
            return std::fabs(x.value - v) <= 1e-12 * std::max(1.0, std::fabs(v));
          },
      },
      a->node);
}

}  // namespace

bool alpha_equal(const TargetTerm& a, const TargetTerm& b) {
  AlphaScope scope;
  return alpha(a, b, scope);
}

// ---------------------------------------------------------------- normalize

namespace {

TargetTerm norm(const TargetTerm& t);

TargetTerm apply_norm(const TargetTerm& fn, const TargetTerm& arg) {
  if (const auto* l = std::get_if<tterm::Lam>(&fn->node)) return norm(substitute(l->body, l->binder, arg));
  if (const auto* lr = std::get_if<tterm::LetRecPred>(&fn->node)) {
    // (letrec f x = B in N) A  ~>  letrec f x = B in N A
    std::string f = lr->fname;
    TargetTerm body = lr->body, rest = lr->rest;
    if (free_vars(arg).count(f)) {
      std::set<std::string> avoid = all_target_names(arg);
      auto more = all_target_names(fn);
      avoid.insert(more.begin(), more.end());
      do {
        f += "'";
      } while (avoid.count(f));
      body = substitute(body, lr->fname, t_var(f));
      rest = substitute(rest, lr->fname, t_var(f));
    }
    return make_target(tterm::LetRecPred{f, lr->binder, lr->arg_type, body, apply_norm(rest, arg), lr->hint});
  }
  return t_app(fn, arg);
}

TargetTerm norm(const TargetTerm& t) {
  return std::visit(
      overloaded{
          [&](const tterm::Const& c) { return make_target(tterm::Const{c.name, norm(c.arg)}); },
          [&](const tterm::Modal& m) { return make_target(tterm::Modal{m.name, m.index, norm(m.arg)}); },
          [&](const tterm::Pair& p) { return t_pair(norm(p.first), norm(p.second)); },
          [&](const tterm::Proj& p) {
            TargetTerm a = norm(p.arg);
            if (const auto* pair = std::get_if<tterm::Pair>(&a->node)) return p.index == 1 ? pair->first : pair->second;
            return t_proj(p.index, a);
          },
          [&](const tterm::Absurd& a) { return make_target(tterm::Absurd{norm(a.arg)}); },
          [&](const tterm::Inj& i) { return make_target(tterm::Inj{i.index, i.sum, norm(i.arg)}); },
          [&](const tterm::Case& c) {
            TargetTerm s = norm(c.scrutinee);
            if (const auto* inj = std::get_if<tterm::Inj>(&s->node)) {
              return inj->index == 1 ? norm(substitute(c.left, c.left_binder, inj->arg))
                                     : norm(substitute(c.right, c.right_binder, inj->arg));
            }
            return make_target(tterm::Case{s, c.left_binder, norm(c.left), c.right_binder, norm(c.right)});
          },
          [&](const tterm::Lam& l) { return t_lam(l.binder, l.type, norm(l.body), l.hint); },
          [&](const tterm::App& a) { return apply_norm(norm(a.fn), norm(a.arg)); },
          [&](const tterm::LetRecPred& lr) {
            TargetTerm body = norm(lr.body), rest = norm(lr.rest);
            // letrec f y = B in \x. N  ~>  \x. letrec f y = B in N
            if (const auto* l = std::get_if<tterm::Lam>(&rest->node)) {
              if (l->binder != lr.fname && !free_vars(body).count(l->binder)) {
                return t_lam(l->binder, l->type,
                             make_target(tterm::LetRecPred{lr.fname, lr.binder, lr.arg_type, body, l->body, lr.hint}),
                             l->hint);
              }
            }
            return make_target(tterm::LetRecPred{lr.fname, lr.binder, lr.arg_type, body, rest, lr.hint});
          },
          [&](const tterm::Binary& b) { return t_bin(b.op, norm(b.left), norm(b.right)); },
          [&](const tterm::Quant& q) { return make_target(tterm::Quant{q.exists, q.binder, q.type, norm(q.body)}); },
          [&](const auto&) { return t; },
      },
      t->node);
}

}  // namespace

TargetTerm normalize(const TargetTerm& term) { return norm(term); }

// ---------------------------------------------------------------- json

namespace {

using nlohmann::json;

const char* binop_name(BinOp op) {
  switch (op) {
    case BinOp::And:
      return "And";
    case BinOp::Or:
      return "Or";
    case BinOp::Implies:
      return "Implies";
    case BinOp::Add:
      return "Add";
    case BinOp::Mul:
      return "Mul";
  }
  return "?";
}

json to_json(const TargetTerm& t) {
  return std::visit(
      overloaded{
          [](const tterm::Var& v) -> json { return {{"node", "Var"}, {"name", v.name}}; },
          [](const tterm::Const& c) -> json { return {{"node", "Const"}, {"name", c.name}, {"arg", to_json(c.arg)}}; },
          [](const tterm::Modal& m) -> json {
            json j = {{"node", "Modal"}, {"op", m.name}, {"arg", to_json(m.arg)}};
            if (!m.index.empty()) j["index"] = m.index;
            return j;
          },
          [](const tterm::UnitVal&) -> json { return {{"node", "UnitVal"}}; },
          [](const tterm::Pair& p) -> json {
            return {{"node", "Pair"}, {"first", to_json(p.first)}, {"second", to_json(p.second)}};
          },
          [](const tterm::Proj& p) -> json { return {{"node", "Proj"}, {"index", p.index}, {"arg", to_json(p.arg)}}; },
          [](const tterm::Absurd& a) -> json { return {{"node", "Absurd"}, {"arg", to_json(a.arg)}}; },
          [](const tterm::Inj& i) -> json {
            return {{"node", "Inj"}, {"index", i.index}, {"type", to_string(i.sum)}, {"arg", to_json(i.arg)}};
          },
          [](const tterm::Case& c) -> json {
            return {{"node", "Case"},
                    {"scrutinee", to_json(c.scrutinee)},
                    {"left_binder", c.left_binder},
                    {"left", to_json(c.left)},
                    {"right_binder", c.right_binder},
                    {"right", to_json(c.right)}};
          },
          [](const tterm::Lam& l) -> json {
            json j = {{"node", "Lam"}, {"binder", l.binder}, {"body", to_json(l.body)}};
            if (l.type) j["type"] = to_string(l.type);
            return j;
          },
          [](const tterm::App& a) -> json { return {{"node", "App"}, {"fn", to_json(a.fn)}, {"arg", to_json(a.arg)}}; },
          [](const tterm::LetRecPred& lr) -> json {
            json j = {{"node", "LetRecPred"},
                      {"fname", lr.fname},
                      {"binder", lr.binder},
                      {"body", to_json(lr.body)},
                      {"rest", to_json(lr.rest)}};
            if (lr.arg_type) j["type"] = to_string(lr.arg_type);
            return j;
          },
          [](const tterm::BoolLit& b) -> json { return {{"node", b.value ? "True" : "False"}}; },
          [](const tterm::Binary& b) -> json {
            return {{"node", binop_name(b.op)}, {"left", to_json(b.left)}, {"right", to_json(b.right)}};
          },
          [](const tterm::Quant& q) -> json {
            return {{"node", q.exists ? "Exists" : "Forall"},
                    {"binder", q.binder},
                    {"type", to_string(q.type)},
                    {"body", to_json(q.body)}};
          },
          [](const tterm::WeightLit& w) -> json {
            json j = {{"node", "WeightLit"}};
            if (std::isinf(w.value)) {
              j["value"] = "inf";
            } else {
              j["value"] = w.value;
            }
            return j;
          },
      },
      t->node);
}

}  // namespace

std::string target_to_json(const TargetTerm& term, int indent) { return to_json(term).dump(indent); }

}  // namespace cpswp
