#include "cpswp/algebra.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <unordered_map>

#include "cpswp/error.hpp"

namespace cpswp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double mul0(double a, double b) { return (a == 0.0 || b == 0.0) ? 0.0 : a * b; }

// ---------------------------------------------------------------- values

struct Val;
using V = std::shared_ptr<const Val>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

using Ans = std::variant<StateSet, double, WeightVector>;

namespace val {
struct Unit {};
struct Nat {
  std::uint64_t n;
};
struct Real {
  double r;
};
struct Pair {
  V first, second;
};
struct Inj {
  int index;
  V value;
};
// Answers; under moments a bare double is a deterministic cost not yet
// lifted to its power vector.
struct Answer {
  Ans a;
};
struct Closure {
  TargetTerm lam;
  Env env;
};
struct Rec {
  int binding;
};
}  // namespace val

struct Val {
  std::variant<val::Unit, val::Nat, val::Real, val::Pair, val::Inj, val::Answer, val::Closure, val::Rec> node;
  mutable int id = -1;
};

template <class T>
V mk(T t) {
  return std::make_shared<const Val>(Val{std::move(t)});
}

struct EnvNode {
  std::string name;
  V value;
  Env next;
};

Env extend(Env e, std::string name, V v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(e)});
}

const V* lookup(const Env& e, const std::string& name) {
  for (const EnvNode* n = e.get(); n; n = n->next.get()) {
    if (n->name == name) return &n->value;
  }
  return nullptr;
}

V from_ground(const GroundValue& g) {
  return std::visit(overloaded{
                        [](const gval::Unit&) { return mk(val::Unit{}); },
                        [](const gval::Nat& n) { return mk(val::Nat{n.value}); },
                        [](const gval::Real& r) { return mk(val::Real{r.value}); },
                        [](const gval::Pair& p) { return mk(val::Pair{from_ground(p.first), from_ground(p.second)}); },
                        [](const gval::Inj& i) { return mk(val::Inj{i.index, from_ground(i.value)}); },
                    },
                    g->node);
}

GroundValue to_ground(const V& v) {
  return std::visit(overloaded{
                        [](const val::Unit&) { return g_unit(); },
                        [](const val::Nat& n) { return g_nat(n.n); },
                        [](const val::Real& r) { return g_real(r.r); },
                        [](const val::Pair& p) { return g_pair(to_ground(p.first), to_ground(p.second)); },
                        [](const val::Inj& i) { return g_inj(i.index, to_ground(i.value)); },
                        [](const auto&) -> GroundValue { throw EvalError("expected ground data, found an answer or predicate"); },
                    },
                    v->node);
}

std::string hex(double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(bits));
  return buf;
}

std::string ans_key(const Ans& a) {
  return std::visit(overloaded{
                        [](const StateSet& s) {
                          std::string k = "s";
                          for (auto q : s.elements()) k += std::to_string(q) + ".";
                          return k;
                        },
                        [](double w) { return "w" + hex(w); },
                        [](const WeightVector& v) {
                          std::string k = "v";
                          for (double w : v) k += hex(w) + ".";
                          return k;
                        },
                    },
                    a);
}

double delta(const Ans& a, const Ans& b) {
  auto d = [](double x, double y) { return x == y ? 0.0 : std::fabs(x - y); };
  return std::visit(overloaded{
                        [&](const StateSet& s) { return s == std::get<StateSet>(b) ? 0.0 : kInf; },
                        [&](double w) { return d(w, std::get<double>(b)); },
                        [&](const WeightVector& v) {
                          const auto& u = std::get<WeightVector>(b);
                          double m = 0;
                          for (std::size_t i = 0; i < v.size(); ++i) m = std::max(m, d(v[i], u[i]));
                          return m;
                        },
                    },
                    a);
}

// new is at least old in the recursion order (reverse inclusion for sets).
bool grows(const Ans& older, const Ans& newer) {
  auto ge = [](double o, double n) { return n >= o - 1e-12 * std::max(1.0, std::fabs(o)); };
  return std::visit(overloaded{
                        [&](const StateSet& s) { return std::get<StateSet>(newer).subset_of(s); },
                        [&](double w) { return ge(w, std::get<double>(newer)); },
                        [&](const WeightVector& v) {
                          const auto& u = std::get<WeightVector>(newer);
                          for (std::size_t i = 0; i < v.size(); ++i) {
                            if (!ge(v[i], u[i])) return false;
                          }
                          return true;
                        },
                    },
                    older);
}

AnswerValue to_answer_value(const Ans& a) {
  return std::visit([](const auto& x) -> AnswerValue { return x; }, a);
}

// ---------------------------------------------------------------- evaluator

struct Binding {
  const tterm::LetRecPred* def;
  Env env;  // without the recursive function itself
};

struct Unknown {
  int binding;
  V arg;
  Ans value;
  bool evaluated = false;
};

class Evaluator {
 public:
  explicit Evaluator(const AlgebraConfig& config) : cfg_(config) {}

  Env env_from(const std::map<std::string, AnswerValue>& env) const {
    Env e;
    for (const auto& [name, v] : env) {
      V x = std::visit(overloaded{
                           [&](const StateSet& s) -> V {
                             if (cfg_.kind != AlgebraKind::Trace || s.universe_size() != cfg_.dfa->size()) {
                               throw EvalError("state set bound to '" + name + "' does not fit the algebra");
                             }
                             return mk(val::Answer{s});
                           },
                           [&](double w) -> V {
                             if (cfg_.kind == AlgebraKind::Trace) throw EvalError("weight bound to '" + name + "' under trace");
                             return mk(val::Answer{w});
                           },
                           [&](const WeightVector& w) -> V {
                             if (cfg_.kind != AlgebraKind::Moments || static_cast<int>(w.size()) != cfg_.moment_order) {
                               throw EvalError("weight vector bound to '" + name + "' does not fit the algebra");
                             }
                             return mk(val::Answer{w});
                           },
                           [&](const GroundValue& g) -> V { return from_ground(g); },
                           [&](const PredicateValue&) -> V {
                             throw EvalError("predicate values cannot be passed into an evaluation");
                           },
                       },
                       v);
      e = extend(e, name, x);
    }
    return e;
  }

  // Global chaotic iteration: every round re-evaluates the top term (when
  // given) and every known unknown against the current table.
  struct RunResult {
    V top;
    EvalStatus status;
    std::uint64_t rounds;
  };

  RunResult run(const TargetTerm* top, const Env& env) {
    std::uint64_t rounds = 0;
    V result;
    while (true) {
      ++rounds;
      bool grew = false;
      double change = 0;
      std::size_t before = unknowns_.size();
      if (top) result = eval(*top, env);
      for (std::size_t i = 0; i < unknowns_.size(); ++i) {
        if (unfoldings_ >= cfg_.max_unfold) {
          if (top) result = eval(*top, env);
          return {result, EvalStatus::Truncated, rounds};
        }
        ++unfoldings_;
        const int bid = unknowns_[i].binding;
        const Binding b = bindings_[bid];  // copies: eval may grow both tables
        Env e = extend(extend(b.env, b.def->fname, mk(val::Rec{bid})), b.def->binder, unknowns_[i].arg);
        Ans next = lift(eval(b.def->body, e));
        Unknown& w = unknowns_[i];
        if (!w.evaluated) {
          w.evaluated = true;
          grew = true;
        }
        if (!grows(w.value, next)) {
          throw EvalError("recursion body of '" + b.def->fname + "' is not monotone in the recursion order");
        }
        change = std::max(change, delta(w.value, next));
        w.value = std::move(next);
      }
      grew = grew || unknowns_.size() != before;
      if (!grew && change == 0) return {result, EvalStatus::Exact, rounds};
      if (!grew && change < cfg_.epsilon && cfg_.kind != AlgebraKind::Trace) {
        if (top) result = eval(*top, env);
        return {result, EvalStatus::Converged, rounds};
      }
    }
  }

  int binding_for(const tterm::LetRecPred* def, const Env& env) {
    std::string key = std::to_string(reinterpret_cast<std::uintptr_t>(def)) + "|";
    for (const auto& x : body_free(def)) {
      const V* v = lookup(env, x);
      key += (v ? std::to_string(id(*v)) : "?") + ",";
    }
    auto [it, fresh] = binding_ids_.emplace(key, static_cast<int>(bindings_.size()));
    if (fresh) {
      bindings_.push_back({def, env});
      preseed(it->second);
    }
    return it->second;
  }

  void demand(int binding, const V& arg) { call_rec(binding, arg); }

  std::vector<std::pair<GroundValue, Ans>> table(int binding) const {
    std::vector<std::pair<GroundValue, Ans>> out;
    for (const auto& u : unknowns_) {
      if (u.binding == binding) out.emplace_back(to_ground(u.arg), u.value);
    }
    return out;
  }

  std::uint64_t unfoldings() const { return unfoldings_; }
  bool used_quadrature() const { return quadrature_; }

  Ans lift(const V& v) const {
    if (const auto* a = std::get_if<val::Answer>(&v->node)) {
      if (cfg_.kind == AlgebraKind::Moments) {
        if (const double* w = std::get_if<double>(&a->a)) return weight_powers(*w, cfg_.moment_order);
      }
      return a->a;
    }
    if (const auto* r = std::get_if<val::Real>(&v->node)) {
      if (cfg_.kind == AlgebraKind::Cost) return weight(r->r);
      if (cfg_.kind == AlgebraKind::Moments) return weight_powers(weight(r->r), cfg_.moment_order);
    }
    throw EvalError("expected an answer value");
  }

  V eval(const TargetTerm& t, const Env& env) {
    return std::visit(
        overloaded{
            [&](const tterm::Var& x) -> V {
              const V* v = lookup(env, x.name);
              if (!v) throw EvalError("unbound variable '" + x.name + "'");
              return *v;
            },
            [&](const tterm::Const& c) -> V {
              return from_ground(apply_constant(c.name, to_ground(eval(c.arg, env))));
            },
            [&](const tterm::Modal& m) -> V { return modal(m, eval(m.arg, env)); },
            [&](const tterm::UnitVal&) -> V { return mk(val::Unit{}); },
            [&](const tterm::Pair& p) -> V { return mk(val::Pair{eval(p.first, env), eval(p.second, env)}); },
            [&](const tterm::Proj& p) -> V {
              V v = eval(p.arg, env);
              const auto* pr = std::get_if<val::Pair>(&v->node);
              if (!pr) throw EvalError("projection of a non-pair");
              return p.index == 1 ? pr->first : pr->second;
            },
            [&](const tterm::Absurd&) -> V { throw EvalError("absurd reached; the empty type has no values"); },
            [&](const tterm::Inj& i) -> V { return mk(val::Inj{i.index, eval(i.arg, env)}); },
            [&](const tterm::Case& c) -> V {
              V v = eval(c.scrutinee, env);
              const auto* in = std::get_if<val::Inj>(&v->node);
              if (!in) throw EvalError("case on a non-injection");
              if (in->index == 1) return eval(c.left, extend(env, c.left_binder, in->value));
              return eval(c.right, extend(env, c.right_binder, in->value));
            },
            [&](const tterm::Lam&) -> V { return mk(val::Closure{t, env}); },
            [&](const tterm::App& a) -> V {
              V f = eval(a.fn, env);
              return apply(f, eval(a.arg, env));
            },
            [&](const tterm::LetRecPred& l) -> V {
              int b = binding_for(&l, env);
              return eval(l.rest, extend(env, l.fname, mk(val::Rec{b})));
            },
            [&](const tterm::BoolLit& b) -> V {
              need_trace("truth constants");
              return answer(b.value ? cfg_.dfa->universe() : StateSet(cfg_.dfa->size()));
            },
            [&](const tterm::Binary& b) -> V { return binary(b, env); },
            [&](const tterm::Quant& q) -> V {
              need_trace("quantifiers");
              StateSet acc = q.exists ? StateSet(cfg_.dfa->size()) : cfg_.dfa->universe();
              for (const auto& g : enumerate_ground(q.type, cfg_.nat_bound)) {
                StateSet s = set_of(eval(q.body, extend(env, q.binder, from_ground(g))));
                acc = q.exists ? (acc | s) : (acc & s);
              }
              return answer(acc);
            },
            [&](const tterm::WeightLit& w) -> V {
              need_numeric("weight literals");
              return answer(weight(w.value));
            },
        },
        t->node);
  }

 private:
  const AlgebraConfig& cfg_;
  std::vector<Binding> bindings_;
  std::unordered_map<std::string, int> binding_ids_;
  std::vector<Unknown> unknowns_;
  std::map<std::pair<int, int>, std::size_t> unknown_ids_;
  std::unordered_map<std::string, int> intern_;
  std::unordered_map<const TargetTermNode*, std::vector<std::string>> lam_free_;
  std::unordered_map<const tterm::LetRecPred*, std::vector<std::string>> rec_free_;
  std::uint64_t unfoldings_ = 0;
  bool quadrature_ = false;

  static V answer(Ans a) { return mk(val::Answer{std::move(a)}); }

  static double weight(double w) {
    if (!(w >= 0.0)) throw EvalError("weight " + std::to_string(w) + " is not in [0, inf]");
    return w;
  }

  Ans bottom() const {
    switch (cfg_.kind) {
      case AlgebraKind::Trace:
        return cfg_.dfa->universe();
      case AlgebraKind::Cost:
        return 0.0;
      case AlgebraKind::Moments:
        return WeightVector(cfg_.moment_order, 0.0);
    }
    return 0.0;
  }

  void need_trace(const char* what) const {
    if (cfg_.kind != AlgebraKind::Trace) throw EvalError(std::string(what) + " are only supported by the trace algebra");
  }
  void need_numeric(const char* what) const {
    if (cfg_.kind == AlgebraKind::Trace) throw EvalError(std::string(what) + " are not supported by the trace algebra");
  }

  StateSet set_of(const V& v) const { return std::get<StateSet>(lift(v)); }

  const std::vector<std::string>& body_free(const tterm::LetRecPred* def) {
    auto it = rec_free_.find(def);
    if (it != rec_free_.end()) return it->second;
    std::vector<std::string> fv;
    for (const auto& x : free_vars(def->body)) {
      if (x != def->fname && x != def->binder) fv.push_back(x);
    }
    return rec_free_.emplace(def, std::move(fv)).first->second;
  }

  int intern(const std::string& key) { return intern_.emplace(key, static_cast<int>(intern_.size())).first->second; }

  // Hash-consed identity of a value; closures are compared intensionally.
  int id(const V& v) {
    if (v->id >= 0) return v->id;
    std::string key = std::visit(
        overloaded{
            [](const val::Unit&) { return std::string("u"); },
            [](const val::Nat& n) { return "n" + std::to_string(n.n); },
            [](const val::Real& r) { return "r" + hex(r.r); },
            [&](const val::Pair& p) { return "p" + std::to_string(id(p.first)) + "," + std::to_string(id(p.second)); },
            [&](const val::Inj& i) { return "i" + std::to_string(i.index) + "," + std::to_string(id(i.value)); },
            [](const val::Answer& a) { return ans_key(a.a); },
            [&](const val::Closure& c) {
              auto it = lam_free_.find(c.lam.get());
              if (it == lam_free_.end()) {
                auto fv = free_vars(c.lam);
                it = lam_free_.emplace(c.lam.get(), std::vector<std::string>(fv.begin(), fv.end())).first;
              }
              std::string k = "c" + std::to_string(reinterpret_cast<std::uintptr_t>(c.lam.get())) + "[";
              for (const auto& x : it->second) {
                const V* w = lookup(c.env, x);
                k += (w ? std::to_string(id(*w)) : "?") + ",";
              }
              return k + "]";
            },
            [](const val::Rec& r) { return "f" + std::to_string(r.binding); },
        },
        v->node);
    v->id = intern(key);
    return v->id;
  }

  // Finite argument types get their whole table up front.
  void preseed(int binding) {
    const TargetType& rho = bindings_[binding].def->arg_type;
    if (!rho || !is_ground(rho)) return;
    std::vector<GroundValue> all;
    try {
      all = enumerate_ground(rho, std::nullopt);
    } catch (const EvalError&) {
      return;
    }
    if (all.size() > 4096) return;
    for (const auto& g : all) call_rec(binding, from_ground(g));
  }

  V call_rec(int binding, const V& arg) {
    auto key = std::make_pair(binding, id(arg));
    auto it = unknown_ids_.find(key);
    if (it == unknown_ids_.end()) {
      it = unknown_ids_.emplace(key, unknowns_.size()).first;
      unknowns_.push_back({binding, arg, bottom(), false});
    }
    return answer(unknowns_[it->second].value);
  }

  V apply(const V& f, const V& arg) {
    if (const auto* c = std::get_if<val::Closure>(&f->node)) {
      const auto& lam = std::get<tterm::Lam>(c->lam->node);
      return eval(lam.body, extend(c->env, lam.binder, arg));
    }
    if (const auto* r = std::get_if<val::Rec>(&f->node)) return call_rec(r->binding, arg);
    throw EvalError("application of a non-function");
  }

  // Branch selector i of 1 + ... + 1 with n summands, left-nested.
  static V selector(int i, int n) {
    if (n == 1) return mk(val::Unit{});
    if (i == n) return mk(val::Inj{2, mk(val::Unit{})});
    return mk(val::Inj{1, selector(i, n - 1)});
  }

  static double probability(const std::string& index) {
    char* end = nullptr;
    double p = std::strtod(index.c_str(), &end);
    if (index.empty() || *end != '\0' || !(p >= 0.0 && p <= 1.0)) {
      throw EvalError("flip index '" + index + "' is not a probability in [0, 1]");
    }
    return p;
  }

  V modal(const tterm::Modal& m, const V& arg) {
    const auto* pr = std::get_if<val::Pair>(&arg->node);
    if (!pr) throw EvalError("modal argument is not a pair");
    const V& k = pr->first;
    auto branch = [&](int i, int n) { return apply(k, selector(i, n)); };
    if (cfg_.kind == AlgebraKind::Trace) {
      if (m.name == "event") return answer(cfg_.dfa->pre(cfg_.dfa->symbol(m.index), set_of(branch(1, 1))));
      if (m.name == "choice") return answer(set_of(branch(1, 2)) & set_of(branch(2, 2)));
      throw EvalError("operation '" + m.name + "' has no interpretation in the trace algebra");
    }
    if (m.name == "tick") return add(answer(1.0), branch(1, 1));
    if (m.name == "flip") {
      double p = probability(m.index);
      return add(scale(p, branch(1, 2)), scale(1.0 - p, branch(2, 2)));
    }
    if (m.name == "unif") {
      // midpoint rule on [0, 1]
      int n = cfg_.quad_points;
      quadrature_ = true;
      Ans acc = bottom();
      for (int i = 0; i < n; ++i) {
        Ans y = lift(apply(k, mk(val::Real{(i + 0.5) / n})));
        if (auto* w = std::get_if<double>(&acc)) {
          *w += std::get<double>(y) / n;
        } else {
          auto& a = std::get<WeightVector>(acc);
          const auto& b = std::get<WeightVector>(y);
          for (std::size_t j = 0; j < a.size(); ++j) a[j] += b[j] / n;
        }
      }
      return answer(acc);
    }
    throw EvalError("operation '" + m.name + "' has no interpretation in the cost algebra");
  }

  // Under moments: bare numbers (real data or weight literals) act as
  // deterministic costs; see add and scale.
  static bool scalar(const V& v) {
    if (std::holds_alternative<val::Real>(v->node)) return true;
    const auto* a = std::get_if<val::Answer>(&v->node);
    return a && std::holds_alternative<double>(a->a);
  }
  static double number(const V& v) {
    if (const auto* r = std::get_if<val::Real>(&v->node)) return weight(r->r);
    return std::get<double>(std::get<val::Answer>(v->node).a);
  }

  V scale(double p, const V& v) {
    if (cfg_.kind == AlgebraKind::Cost) return answer(mul0(p, std::get<double>(lift(v))));
    WeightVector w = std::get<WeightVector>(lift(v));
    for (double& x : w) x = mul0(p, x);
    return answer(std::move(w));
  }

  V add(const V& a, const V& b) {
    if (cfg_.kind == AlgebraKind::Cost) return answer(std::get<double>(lift(a)) + std::get<double>(lift(b)));
    bool sa = scalar(a), sb = scalar(b);
    if (sa && sb) {
      double s = number(a) + number(b);
      if (std::holds_alternative<val::Real>(a->node) && std::holds_alternative<val::Real>(b->node)) {
        return mk(val::Real{s});
      }
      return answer(s);
    }
    if (sa) return answer(elapse(std::get<WeightVector>(lift(b)), number(a)));
    if (sb) return answer(elapse(std::get<WeightVector>(lift(a)), number(b)));
    WeightVector x = std::get<WeightVector>(lift(a));
    const WeightVector y = std::get<WeightVector>(lift(b));
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += y[i];
    return answer(std::move(x));
  }

  V mul(const V& a, const V& b) {
    if (cfg_.kind == AlgebraKind::Cost) return answer(mul0(std::get<double>(lift(a)), std::get<double>(lift(b))));
    if (std::holds_alternative<val::Real>(a->node) && std::holds_alternative<val::Real>(b->node)) {
      return mk(val::Real{number(a) * number(b)});
    }
    if (scalar(a)) return scale(number(a), b);
    if (scalar(b)) return scale(number(b), a);
    throw EvalError("the moments algebra cannot multiply two non-deterministic costs");
  }

  V binary(const tterm::Binary& b, const Env& env) {
    switch (b.op) {
      case BinOp::And:
      case BinOp::Or:
      case BinOp::Implies: {
        need_trace("connectives");
        StateSet l = set_of(eval(b.left, env));
        StateSet r = set_of(eval(b.right, env));
        if (b.op == BinOp::And) return answer(l & r);
        if (b.op == BinOp::Or) return answer(l | r);
        return answer(l.complement() | r);
      }
      case BinOp::Add:
      case BinOp::Mul: {
        need_numeric("weight arithmetic");
        V l = eval(b.left, env);
        V r = eval(b.right, env);
        return b.op == BinOp::Add ? add(l, r) : mul(l, r);
      }
    }
    throw EvalError("unknown connective");
  }
};

AnswerValue to_answer(const Evaluator& ev, const V& v) {
  if (std::holds_alternative<val::Answer>(v->node) || std::holds_alternative<val::Real>(v->node)) {
    try {
      return to_answer_value(ev.lift(v));
    } catch (const EvalError&) {
    }
  }
  if (std::holds_alternative<val::Closure>(v->node) || std::holds_alternative<val::Rec>(v->node)) {
    return PredicateValue{"<predicate>"};
  }
  return to_ground(v);
}

}  // namespace

void AlgebraConfig::validate() const {
  if (!(epsilon > 0)) throw Error("epsilon must be positive");
  if (max_unfold < 1) throw Error("max_unfold must be at least 1");
  if (quad_points < 1) throw Error("quad_points must be at least 1");
  if (kind == AlgebraKind::Trace && !dfa) throw Error("the trace algebra needs an automaton");
  if (kind == AlgebraKind::Moments && moment_order < 1) throw Error("moment order must be at least 1");
}

std::string to_string(EvalStatus s) {
  switch (s) {
    case EvalStatus::Exact:
      return "exact";
    case EvalStatus::Converged:
      return "converged";
    case EvalStatus::Truncated:
      return "truncated";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Holds:
      return "holds";
    case Verdict::Fails:
      return "fails";
    case Verdict::Unknown:
      return "unknown";
  }
  return "?";
}

EvalResult evaluate(const AlgebraConfig& config, const std::map<std::string, AnswerValue>& env,
                    const TargetTerm& term) {
  config.validate();
  Evaluator ev(config);
  Env e = ev.env_from(env);
  auto r = ev.run(&term, e);
  EvalResult out;
  out.value = to_answer(ev, r.top);
  out.status = r.status;
  if (out.status == EvalStatus::Exact && ev.used_quadrature()) out.status = EvalStatus::Converged;
  out.iterations = r.rounds;
  out.unfoldings = ev.unfoldings();
  return out;
}

EvalResult evaluate(const AlgebraConfig& config, const TargetTerm& term) { return evaluate(config, {}, term); }

WeightVector elapse(const WeightVector& a, double b) {
  int n = static_cast<int>(a.size());
  WeightVector out(n);
  std::vector<double> bp(n + 1, 1.0);  // b^0 .. b^n, with inf^0 = 1
  for (int i = 1; i <= n; ++i) bp[i] = mul0(bp[i - 1], b);
  for (int i = 1; i <= n; ++i) {
    double s = bp[i];
    double c = 1;  // C(i, j)
    for (int j = 1; j <= i; ++j) {
      c = c * (i - j + 1) / j;
      s += mul0(c, mul0(a[j - 1], bp[i - j]));
    }
    out[i - 1] = s;
  }
  return out;
}

WeightVector weight_powers(double w, int n) {
  WeightVector out(n);
  double p = 1;
  for (int i = 0; i < n; ++i) out[i] = p = mul0(p, w);
  return out;
}

std::vector<GroundValue> enumerate_ground(const TargetType& t, std::optional<std::uint64_t> nat_bound) {
  return std::visit(
      overloaded{
          [&](const ttype::Unit&) { return std::vector<GroundValue>{g_unit()}; },
          [&](const ttype::Empty&) { return std::vector<GroundValue>{}; },
          [&](const ttype::Base& b) {
            if (b.name == "nat" && nat_bound) {
              std::vector<GroundValue> out;
              for (std::uint64_t i = 0; i < *nat_bound; ++i) out.push_back(g_nat(i));
              return out;
            }
            throw EvalError("base type '" + b.name + "' is not an enumerable domain");
          },
          [&](const ttype::Prod& p) {
            std::vector<GroundValue> out;
            auto ls = enumerate_ground(p.left, nat_bound);
            auto rs = enumerate_ground(p.right, nat_bound);
            for (const auto& l : ls) {
              for (const auto& r : rs) out.push_back(g_pair(l, r));
            }
            return out;
          },
          [&](const ttype::Sum& s) {
            std::vector<GroundValue> out;
            for (const auto& l : enumerate_ground(s.left, nat_bound)) out.push_back(g_inj(1, l));
            for (const auto& r : enumerate_ground(s.right, nat_bound)) out.push_back(g_inj(2, r));
            return out;
          },
          [&](const auto&) -> std::vector<GroundValue> {
            throw EvalError("type " + to_string(t) + " is not an enumerable domain");
          },
      },
      t->node);
}

FixpointTable fixpoint_letrec(const AlgebraConfig& config, const std::map<std::string, AnswerValue>& env,
                              const std::string& fname, const std::string& binder, const TargetType& rho,
                              const TargetTerm& body, const std::vector<GroundValue>& demanded) {
  config.validate();
  if (!rho || !is_ground(rho)) throw EvalError("recursion argument type must be ground");
  // The definition node must outlive the evaluator's bindings.
  TargetTerm def = make_target(tterm::LetRecPred{fname, binder, rho, body, t_unitval(), std::nullopt});
  Evaluator ev(config);
  Env e = ev.env_from(env);
  int b = ev.binding_for(&std::get<tterm::LetRecPred>(def->node), e);
  for (const auto& g : demanded) ev.demand(b, from_ground(g));
  auto r = ev.run(nullptr, e);
  FixpointTable out;
  out.status = r.status;
  out.iterations = r.rounds;
  for (auto& [g, a] : ev.table(b)) out.entries.emplace_back(g, to_answer_value(a));
  return out;
}

TraceCheck check_trace_property(const AlgebraConfig& config, const TargetTerm& formula) {
  if (config.kind != AlgebraKind::Trace) throw Error("trace properties need the trace algebra");
  config.validate();
  TraceCheck out;
  if (!config.dfa->all_final()) {
    out.warnings.push_back("automaton has non-final states; the reduction assumes every state is final");
  }
  out.result = evaluate(config, formula);
  const auto* s = std::get_if<StateSet>(&out.result.value);
  if (!s) throw EvalError("trace formula did not evaluate to a state set");
  if (!s->contains(config.dfa->initial())) {
    out.verdict = Verdict::Fails;
  } else {
    out.verdict = out.result.status == EvalStatus::Exact ? Verdict::Holds : Verdict::Unknown;
  }
  return out;
}

nlohmann::json answer_to_json(const AnswerValue& v, const AlgebraConfig& config) {
  using nlohmann::json;
  auto weight = [](double w) -> json {
    if (std::isinf(w)) return "inf";
    return w;
  };
  return std::visit(overloaded{
                        [&](const StateSet& s) -> json {
                          json a = json::array();
                          for (auto q : s.elements()) {
                            if (config.dfa) {
                              a.push_back(config.dfa->relation().states[q]);
                            } else {
                              a.push_back(std::to_string(q));
                            }
                          }
                          return a;
                        },
                        [&](double w) -> json { return weight(w); },
                        [&](const WeightVector& v) -> json {
                          json a = json::array();
                          for (double w : v) a.push_back(weight(w));
                          return a;
                        },
                        [&](const GroundValue& g) -> json { return to_string(g); },
                        [&](const PredicateValue& p) -> json { return p.description; },
                    },
                    v);
}

nlohmann::json eval_result_to_json(const EvalResult& r, const AlgebraConfig& config) {
  nlohmann::json j;
  j["value"] = answer_to_json(r.value, config);
  j["status"] = to_string(r.status);
  j["iterations"] = r.iterations;
  j["error_bound"] = r.error_bound ? nlohmann::json(*r.error_bound) : nlohmann::json(nullptr);
  return j;
}

}  // namespace cpswp
