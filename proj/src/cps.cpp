#include "cpswp/cps.hpp"

#include <cstdlib>
#include <functional>

#include "cpswp/error.hpp"
#include "cpswp/typecheck.hpp"

namespace cpswp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

TargetType cont(const SourceType& t) { return t_pred(cps_type(t)); }

}  // namespace

TargetType cps_type(const SourceType& t) {
  return std::visit(overloaded{
                        [](const stype::Base& b) { return t_base(b.name); },
                        [](const stype::Unit&) { return t_unit(); },
                        [](const stype::Empty&) { return t_empty(); },
                        [](const stype::Prod& p) { return t_prod(cps_type(p.left), cps_type(p.right)); },
                        [](const stype::Sum& s) { return t_sum(cps_type(s.left), cps_type(s.right)); },
                        [](const stype::Arrow& a) { return t_pred(t_prod(cps_type(a.from), cont(a.to))); },
                    },
                    t->node);
}

namespace {

class Cps {
 public:
  explicit Cps(std::set<std::string> used) : used_(std::move(used)) {}

  struct Out {
    TargetTerm term;
    SourceType type;
  };
  using Env = std::vector<std::pair<std::string, SourceType>>;

  Out run(const SourceTerm& t, Env& env) {
    return std::visit(
        overloaded{
            [&](const sterm::Var& v) -> Out {
              SourceType ty = lookup(env, v.name);
              std::string k = fresh("k");
              return {t_lam(k, cont(ty), t_app(t_var(k), t_var(v.name))), ty};
            },
            [&](const sterm::Const& c) -> Out {
              std::string k = fresh("k"), x = fresh("m");
              Out m = run(c.arg, env);
              SourceType car = coarity_of(c.name);
              TargetTerm inner = t_lam(x, cps_type(m.type), t_app(t_var(k), make_target(tterm::Const{c.name, t_var(x)})));
              return {t_lam(k, cont(car), t_app(m.term, inner)), car};
            },
            [&](const sterm::Op& o) -> Out {
              std::string k = fresh("k"), m1 = fresh("m"), m2 = fresh("m"), z = fresh("p"), x = fresh("x");
              Out m = run(o.arg, env);
              const auto& prod = std::get<stype::Prod>(m.type->node);
              const auto& arrow = std::get<stype::Arrow>(prod.left->node);
              TargetType zt = cps_type(m.type);
              TargetTerm call = t_app(t_proj(1, t_var(z)), t_pair(t_var(x), t_var(k)));
              TargetTerm modal = make_target(
                  tterm::Modal{o.name, o.index, t_pair(t_lam(x, cps_type(arrow.from), call), t_proj(2, t_var(z)))});
              TargetTerm inner = t_lam(z, zt, modal, std::make_pair(m1, m2));
              return {t_lam(k, cont(o.result), t_app(m.term, inner)), o.result};
            },
            [&](const sterm::UnitVal&) -> Out {
              std::string k = fresh("k");
              return {t_lam(k, cont(unit_type()), t_app(t_var(k), t_unitval())), unit_type()};
            },
            [&](const sterm::Pair& p) -> Out {
              std::string k = fresh("k"), m1 = fresh("m"), m2 = fresh("m");
              Out a = run(p.first, env);
              Out b = run(p.second, env);
              SourceType ty = prod_type(a.type, b.type);
              TargetTerm innermost = t_lam(m2, cps_type(b.type), t_app(t_var(k), t_pair(t_var(m1), t_var(m2))));
              TargetTerm inner = t_lam(m1, cps_type(a.type), t_app(b.term, innermost));
              return {t_lam(k, cont(ty), t_app(a.term, inner)), ty};
            },
            [&](const sterm::Proj& p) -> Out {
              std::string k = fresh("k"), x = fresh("m");
              Out m = run(p.arg, env);
              const auto& prod = std::get<stype::Prod>(m.type->node);
              SourceType ty = p.index == 1 ? prod.left : prod.right;
              TargetTerm inner = t_lam(x, cps_type(m.type), t_app(t_var(k), t_proj(p.index, t_var(x))));
              return {t_lam(k, cont(ty), t_app(m.term, inner)), ty};
            },
            [&](const sterm::Absurd& a) -> Out {
              std::string k = fresh("k"), x = fresh("m");
              Out m = run(a.arg, env);
              TargetTerm inner = t_lam(x, t_empty(), make_target(tterm::Absurd{t_var(x)}));
              return {t_lam(k, cont(a.result), t_app(m.term, inner)), a.result};
            },
            [&](const sterm::Inj& i) -> Out {
              std::string k = fresh("k"), x = fresh("m");
              Out m = run(i.arg, env);
              TargetTerm inj = make_target(tterm::Inj{i.index, cps_type(i.sum), t_var(x)});
              TargetTerm inner = t_lam(x, cps_type(m.type), t_app(t_var(k), inj));
              return {t_lam(k, cont(i.sum), t_app(m.term, inner)), i.sum};
            },
            [&](const sterm::Case& c) -> Out {
              std::string k = fresh("k"), x = fresh("m");
              Out m = run(c.scrutinee, env);
              const auto& sum = std::get<stype::Sum>(m.type->node);
              env.emplace_back(c.left_binder, sum.left);
              Out l = run(c.left, env);
              env.back() = {c.right_binder, sum.right};
              Out r = run(c.right, env);
              env.pop_back();
              TargetTerm branch = make_target(tterm::Case{t_var(x), c.left_binder, t_app(l.term, t_var(k)),
                                                          c.right_binder, t_app(r.term, t_var(k))});
              TargetTerm inner = t_lam(x, cps_type(m.type), branch);
              return {t_lam(k, cont(l.type), t_app(m.term, inner)), l.type};
            },
            [&](const sterm::Lam& l) -> Out {
              std::string k = fresh("k"), h = fresh("k");
              env.emplace_back(l.binder, l.type);
              Out body = run(l.body, env);
              env.pop_back();
              SourceType ty = arrow_type(l.type, body.type);
              TargetTerm fn = pair_lambda(l.binder, h, t_prod(cps_type(l.type), cont(body.type)),
                                          t_app(body.term, t_var(h)));
              return {t_lam(k, cont(ty), t_app(t_var(k), fn)), ty};
            },
            [&](const sterm::App& a) -> Out {
              std::string k = fresh("k"), m = fresh("m"), n = fresh("m");
              Out f = run(a.fn, env);
              Out x = run(a.arg, env);
              const auto* arrow = std::get_if<stype::Arrow>(&f.type->node);
              if (!arrow) throw TypeError("cps: application of non-function");
              TargetTerm call = t_lam(n, cps_type(x.type), t_app(t_var(m), t_pair(t_var(n), t_var(k))));
              TargetTerm inner = t_lam(m, cps_type(f.type), t_app(x.term, call));
              return {t_lam(k, cont(arrow->to), t_app(f.term, inner)), arrow->to};
            },
            [&](const sterm::LetRec& lr) -> Out {
              SourceType fty = arrow_type(lr.arg_type, lr.result_type);
              std::string k = fresh("k"), z = fresh("p");
              env.emplace_back(lr.fname, fty);
              env.emplace_back(lr.binder, lr.arg_type);
              Out body = run(lr.body, env);
              env.pop_back();
              Out rest = run(lr.rest, env);
              env.pop_back();
              TargetTerm b = substitute(substitute(t_app(body.term, t_var(k)), lr.binder, t_proj(1, t_var(z))), k,
                                        t_proj(2, t_var(z)));
              TargetType zt = t_prod(cps_type(lr.arg_type), cont(lr.result_type));
              return {make_target(tterm::LetRecPred{lr.fname, z, zt, b, rest.term, std::make_pair(lr.binder, k)}),
                      rest.type};
            },
        },
        t->node);
  }

  const Signature* sig = nullptr;

 private:
  std::string fresh(const char* prefix) {
    std::string n;
    int& counter = counters_[prefix];
    do {
      n = prefix + std::to_string(counter++);
    } while (used_.count(n));
    used_.insert(n);
    return n;
  }

  SourceType lookup(const Env& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    throw TypeError("cps: unbound variable '" + name + "'");
  }

  SourceType coarity_of(const std::string& name) {
    const ConstantDecl* d = sig->find_constant(name);
    if (!d) throw TypeError("cps: unknown constant '" + name + "'");
    return d->coarity;
  }

  // \(x, h). body, stored as \z. body[fst z/x, snd z/h]
  TargetTerm pair_lambda(const std::string& x, const std::string& h, TargetType type, const TargetTerm& body) {
    std::string z = fresh("p");
    TargetTerm b = substitute(substitute(body, x, t_proj(1, t_var(z))), h, t_proj(2, t_var(z)));
    return t_lam(z, std::move(type), b, std::make_pair(x, h));
  }

  std::set<std::string> used_;
  std::map<std::string, int> counters_;
};

}  // namespace

CpsOutput cps_term(const Signature& sig, const TypingContext& ctx, const SourceTerm& term) {
  Elaborated e = elaborate(sig, ctx, term);
  std::set<std::string> used = all_names(e.term);
  Cps::Env env;
  for (const auto& [name, type] : ctx.entries()) {
    env.emplace_back(name, type);
    used.insert(name);
  }
  Cps cps(used);
  cps.sig = &sig;
  Cps::Out out = cps.run(e.term, env);
  return CpsOutput{out.term, t_pred(cont(out.type)), out.type};
}

CpsOutput cps_term(const Signature& sig, const SourceTerm& term) { return cps_term(sig, TypingContext{}, term); }

// ---------------------------------------------------------------- rewrites

namespace {

TargetTerm map_children(const TargetTerm& t, const std::function<TargetTerm(const TargetTerm&)>& f) {
  return std::visit(
      overloaded{
          [&](const tterm::Const& c) { return make_target(tterm::Const{c.name, f(c.arg)}); },
          [&](const tterm::Modal& m) { return make_target(tterm::Modal{m.name, m.index, f(m.arg)}); },
          [&](const tterm::Pair& p) { return t_pair(f(p.first), f(p.second)); },
          [&](const tterm::Proj& p) { return t_proj(p.index, f(p.arg)); },
          [&](const tterm::Absurd& a) { return make_target(tterm::Absurd{f(a.arg)}); },
          [&](const tterm::Inj& i) { return make_target(tterm::Inj{i.index, i.sum, f(i.arg)}); },
          [&](const tterm::Case& c) {
            return make_target(tterm::Case{f(c.scrutinee), c.left_binder, f(c.left), c.right_binder, f(c.right)});
          },
          [&](const tterm::Lam& l) { return t_lam(l.binder, l.type, f(l.body), l.hint); },
          [&](const tterm::App& a) { return t_app(f(a.fn), f(a.arg)); },
          [&](const tterm::LetRecPred& lr) {
            return make_target(tterm::LetRecPred{lr.fname, lr.binder, lr.arg_type, f(lr.body), f(lr.rest), lr.hint});
          },
          [&](const tterm::Binary& b) { return t_bin(b.op, f(b.left), f(b.right)); },
          [&](const tterm::Quant& q) { return make_target(tterm::Quant{q.exists, q.binder, q.type, f(q.body)}); },
          [&](const auto&) { return t; },
      },
      t->node);
}

// The value selecting branch i of delta over 1 + ... + 1 (n summands, left-nested).
TargetTerm injection(int i, int n) {
  if (n == 1) return t_unitval();
  TargetType sum = ground_to_target(finite_sum_type(n));
  if (i == n) return make_target(tterm::Inj{2, sum, t_unitval()});
  return make_target(tterm::Inj{1, sum, injection(i, n - 1)});
}

// The branches of an n-ary modal argument N: either read off the sugar, or
// fst N applied to each injection into 1 + ... + 1.
std::vector<TargetTerm> branches_of(const TargetTerm& arg, int n) {
  std::vector<TargetTerm> out;
  if (match_nary_modal(arg, n, out)) return out;
  out.clear();
  TargetTerm fn = t_proj(1, arg);
  for (int i = 1; i <= n; ++i) out.push_back(t_app(fn, injection(i, n)));
  return out;
}

double probability(const std::string& index) {
  char* end = nullptr;
  double p = std::strtod(index.c_str(), &end);
  if (index.empty() || *end != '\0' || !(p >= 0.0 && p <= 1.0)) {
    throw Error("flip index '" + index + "' is not a probability in [0, 1]");
  }
  return p;
}

TargetTerm trace_pass(const TargetTerm& t) {
  TargetTerm r = map_children(t, trace_pass);
  if (const auto* m = std::get_if<tterm::Modal>(&r->node); m && m->name == "choice") {
    if (!m->index.empty()) throw Error("choice takes no index");
    auto b = branches_of(m->arg, 2);
    return t_bin(BinOp::And, b[0], b[1]);
  }
  return r;
}

TargetTerm cost_pass(const TargetTerm& t) {
  TargetTerm r = map_children(t, cost_pass);
  const auto* m = std::get_if<tterm::Modal>(&r->node);
  if (!m) return r;
  if (m->name == "tick") {
    if (!m->index.empty()) throw Error("tick takes no index");
    return t_bin(BinOp::Add, t_weight(1.0), branches_of(m->arg, 1)[0]);
  }
  if (m->name == "flip") {
    double p = probability(m->index);
    auto b = branches_of(m->arg, 2);
    return t_bin(BinOp::Add, t_bin(BinOp::Mul, t_weight(p), b[0]), t_bin(BinOp::Mul, t_weight(1.0 - p), b[1]));
  }
  return r;
}

}  // namespace

TargetTerm rewrite_trace(const TargetTerm& term) { return trace_pass(term); }
TargetTerm rewrite_cost(const TargetTerm& term) { return cost_pass(term); }

}  // namespace cpswp
