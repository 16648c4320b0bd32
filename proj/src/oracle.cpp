#include "cpswp/oracle.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

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

struct SVal;
using V = std::shared_ptr<const SVal>;
struct EnvNode;
using Env = std::shared_ptr<const EnvNode>;

namespace sv {
struct Data {
  GroundValue g;
};
struct Pair {
  V first, second;
};
struct Inj {
  int index;
  V value;
};
struct Closure {
  SourceTerm lam;
  Env env;
};
struct Rec {
  SourceTerm def;
  Env env;
};
}  // namespace sv

// Ground data stays a GroundValue unless a component is a function.
struct SVal {
  std::variant<sv::Data, sv::Pair, sv::Inj, sv::Closure, sv::Rec> node;
};

template <class T>
V mk(T t) {
  return std::make_shared<const SVal>(SVal{std::move(t)});
}

struct EnvNode {
  std::string name;
  V value;
  Env next;
};

Env extend(Env e, std::string name, V v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(e)});
}

V data(GroundValue g) { return mk(sv::Data{std::move(g)}); }

std::optional<GroundValue> ground_of(const V& v) {
  return std::visit(overloaded{
                        [](const sv::Data& d) -> std::optional<GroundValue> { return d.g; },
                        [](const sv::Pair& p) -> std::optional<GroundValue> {
                          auto a = ground_of(p.first), b = ground_of(p.second);
                          if (!a || !b) return std::nullopt;
                          return g_pair(*a, *b);
                        },
                        [](const sv::Inj& i) -> std::optional<GroundValue> {
                          auto a = ground_of(i.value);
                          if (!a) return std::nullopt;
                          return g_inj(i.index, *a);
                        },
                        [](const auto&) -> std::optional<GroundValue> { return std::nullopt; },
                    },
                    v->node);
}

GroundValue need_ground(const V& v) {
  auto g = ground_of(v);
  if (!g) throw OracleError("expected ground data, found a function");
  return *g;
}

enum class Mode { Trace, Cost };

struct Path {
  Word trace;
  std::uint64_t cost = 0;
  double prob = 1;
  int fuel = 0;
};

// One run: either a value or a cut at the unfolding bound.
struct Outcome {
  Path path;
  V value;  // null when cut
};

using Outcomes = std::vector<Outcome>;

class Interp {
 public:
  explicit Interp(Mode mode) : mode_(mode) {}

  Outcomes eval(const SourceTerm& t, const Env& env, const Path& path) {
    return std::visit(
        overloaded{
            [&](const sterm::Var& x) -> Outcomes {
              for (const EnvNode* n = env.get(); n; n = n->next.get()) {
                if (n->name == x.name) return {{path, n->value}};
              }
              throw OracleError("unbound variable '" + x.name + "'");
            },
            [&](const sterm::Const& c) -> Outcomes {
              return bind(eval(c.arg, env, path), [&](const Outcome& o) -> Outcomes {
                return {{o.path, data(apply_constant(c.name, need_ground(o.value)))}};
              });
            },
            [&](const sterm::Op& op) -> Outcomes {
              return bind(eval(op.arg, env, path), [&](const Outcome& o) { return operation(op, o); });
            },
            [&](const sterm::UnitVal&) -> Outcomes { return {{path, data(g_unit())}}; },
            [&](const sterm::Pair& p) -> Outcomes {
              return bind(eval(p.first, env, path), [&](const Outcome& a) {
                return bind(eval(p.second, env, a.path), [&](const Outcome& b) -> Outcomes {
                  return {{b.path, mk(sv::Pair{a.value, b.value})}};
                });
              });
            },
            [&](const sterm::Proj& p) -> Outcomes {
              return bind(eval(p.arg, env, path), [&](const Outcome& o) -> Outcomes {
                return {{o.path, project(o.value, p.index)}};
              });
            },
            [&](const sterm::Absurd&) -> Outcomes { throw OracleError("absurd reached"); },
            [&](const sterm::Inj& i) -> Outcomes {
              return bind(eval(i.arg, env, path), [&](const Outcome& o) -> Outcomes {
                return {{o.path, mk(sv::Inj{i.index, o.value})}};
              });
            },
            [&](const sterm::Case& c) -> Outcomes {
              return bind(eval(c.scrutinee, env, path), [&](const Outcome& o) {
                auto [index, v] = injection(o.value);
                if (index == 1) return eval(c.left, extend(env, c.left_binder, v), o.path);
                return eval(c.right, extend(env, c.right_binder, v), o.path);
              });
            },
            [&](const sterm::Lam&) -> Outcomes { return {{path, mk(sv::Closure{t, env})}}; },
            [&](const sterm::App& a) -> Outcomes {
              return bind(eval(a.fn, env, path), [&](const Outcome& f) {
                return bind(eval(a.arg, env, f.path), [&](const Outcome& x) { return apply(f.value, x.value, x.path); });
              });
            },
            [&](const sterm::LetRec& l) -> Outcomes {
              return eval(l.rest, extend(env, l.fname, mk(sv::Rec{t, env})), path);
            },
        },
        t->node);
  }

 private:
  Mode mode_;

  template <class F>
  static Outcomes bind(const Outcomes& in, F&& f) {
    Outcomes out;
    for (const auto& o : in) {
      if (!o.value) {
        out.push_back(o);
        continue;
      }
      auto next = f(o);
      out.insert(out.end(), std::make_move_iterator(next.begin()), std::make_move_iterator(next.end()));
    }
    return out;
  }

  static V project(const V& v, int index) {
    if (const auto* p = std::get_if<sv::Pair>(&v->node)) return index == 1 ? p->first : p->second;
    if (const auto* d = std::get_if<sv::Data>(&v->node)) {
      if (const auto* p = std::get_if<gval::Pair>(&d->g->node)) return data(index == 1 ? p->first : p->second);
    }
    throw OracleError("projection of a non-pair");
  }

  static std::pair<int, V> injection(const V& v) {
    if (const auto* i = std::get_if<sv::Inj>(&v->node)) return {i->index, i->value};
    if (const auto* d = std::get_if<sv::Data>(&v->node)) {
      if (const auto* i = std::get_if<gval::Inj>(&d->g->node)) return {i->index, data(i->value)};
    }
    throw OracleError("case on a non-injection");
  }

  Outcomes apply(const V& f, const V& arg, const Path& path) {
    if (const auto* c = std::get_if<sv::Closure>(&f->node)) {
      const auto& lam = std::get<sterm::Lam>(c->lam->node);
      return eval(lam.body, extend(c->env, lam.binder, arg), path);
    }
    if (const auto* r = std::get_if<sv::Rec>(&f->node)) {
      if (path.fuel <= 0) return {{path, nullptr}};
      Path p = path;
      --p.fuel;
      const auto& def = std::get<sterm::LetRec>(r->def->node);
      return eval(def.body, extend(extend(r->env, def.fname, f), def.binder, arg), p);
    }
    throw OracleError("application of a non-function");
  }

  // Branch selector i of 1 + ... + 1 with n summands, left-nested.
  static V selector(int i, int n) {
    if (n == 1) return data(g_unit());
    if (i == n) return data(g_inj(2, g_unit()));
    return mk(sv::Inj{1, selector(i, n - 1)});
  }

  Outcomes operation(const sterm::Op& op, const Outcome& o) {
    V k = project(o.value, 1);
    if (mode_ == Mode::Trace) {
      if (op.name == "event") {
        Path p = o.path;
        p.trace.push_back(op.index);
        return apply(k, selector(1, 1), p);
      }
      if (op.name == "choice") {
        Outcomes out = apply(k, selector(1, 2), o.path);
        Outcomes right = apply(k, selector(2, 2), o.path);
        out.insert(out.end(), right.begin(), right.end());
        return out;
      }
      throw OracleError("operation '" + op.name + "' is not a trace operation");
    }
    if (op.name == "tick") {
      Path p = o.path;
      ++p.cost;
      return apply(k, selector(1, 1), p);
    }
    if (op.name == "flip") {
      char* end = nullptr;
      double q = std::strtod(op.index.c_str(), &end);
      if (op.index.empty() || *end != '\0' || !(q >= 0.0 && q <= 1.0)) {
        throw OracleError("flip index '" + op.index + "' is not a probability in [0, 1]");
      }
      Path l = o.path, r = o.path;
      l.prob *= q;
      r.prob *= 1.0 - q;
      Outcomes out = apply(k, selector(1, 2), l);
      Outcomes right = apply(k, selector(2, 2), r);
      out.insert(out.end(), right.begin(), right.end());
      return out;
    }
    if (op.name == "unif") throw OracleError("unif is continuous; the oracle only handles discrete programs");
    throw OracleError("operation '" + op.name + "' is not a cost operation");
  }
};

Outcomes run(const Signature& sig, const SourceTerm& term, int depth, Mode mode) {
  if (depth < 0) throw OracleError("depth must be nonnegative");
  Elaborated e = elaborate(sig, TypingContext{}, term);
  if (!is_ground(e.type)) throw OracleError("program type " + to_string(e.type) + " is not ground");
  Interp interp(mode);
  Path start;
  start.fuel = depth;
  return interp.eval(e.term, nullptr, start);
}

StateSet pre_word(const Dfa& dfa, const Word& w, StateSet s) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    auto a = dfa.relation().symbol_index(*it);
    if (!a) return StateSet(dfa.size());
    s = dfa.pre(*a, s);
  }
  return s;
}

}  // namespace

TraceApprox run_trace(const Signature& sig, const SourceTerm& term, int depth) {
  TraceApprox out;
  out.depth = depth;
  out.unterminated.insert(Word{});
  for (const auto& o : run(sig, term, depth, Mode::Trace)) {
    Word prefix;
    for (const auto& a : o.path.trace) {
      prefix.push_back(a);
      out.unterminated.insert(prefix);
    }
    if (o.value) {
      out.terminated[o.path.trace].insert(need_ground(o.value));
    } else {
      out.complete = false;
    }
  }
  return out;
}

CostDistribution run_cost(const Signature& sig, const SourceTerm& term, int depth) {
  CostDistribution out;
  out.depth = depth;
  for (const auto& o : run(sig, term, depth, Mode::Cost)) {
    if (o.value) {
      out.mass[{o.path.cost, need_ground(o.value)}] += o.path.prob;
    } else {
      out.truncated_mass += o.path.prob;
    }
  }
  return out;
}

StateSet oracle_wp_trace(const TraceApprox& approx, const Dfa& dfa, const StateSet& post) {
  StateSet acc = dfa.universe();
  for (const auto& w : approx.unterminated) acc = acc & pre_word(dfa, w, dfa.universe());
  for (const auto& [w, values] : approx.terminated) acc = acc & pre_word(dfa, w, post);
  return acc;
}

Verdict oracle_trace_verdict(const TraceApprox& approx, const Dfa& dfa) {
  StateSet wp = oracle_wp_trace(approx, dfa, dfa.universe());
  if (!wp.contains(dfa.initial())) return Verdict::Fails;
  return approx.complete ? Verdict::Holds : Verdict::Unknown;
}

EctBound oracle_ect(const CostDistribution& dist, std::optional<double> cut_cost_bound) {
  EctBound out;
  for (const auto& [key, p] : dist.mass) out.lower += static_cast<double>(key.first) * p;
  if (dist.truncated_mass > 0) {
    if (cut_cost_bound) {
      out.upper_gap = dist.truncated_mass * *cut_cost_bound;
    } else {
      out.upper_gap = std::numeric_limits<double>::infinity();
      out.bounded = false;
    }
  }
  return out;
}

WeightVector oracle_moments(const CostDistribution& dist, int n) {
  if (n < 1) throw OracleError("moment order must be at least 1");
  WeightVector out(n, 0.0);
  for (const auto& [key, p] : dist.mass) {
    double c = static_cast<double>(key.first), ci = 1;
    for (int i = 0; i < n; ++i) {
      ci *= c;
      out[i] += ci * p;
    }
  }
  return out;
}

nlohmann::json trace_approx_to_json(const TraceApprox& a) {
  using nlohmann::json;
  json j;
  j["depth"] = a.depth;
  j["complete"] = a.complete;
  j["unterminated"] = json::array();
  for (const auto& w : a.unterminated) j["unterminated"].push_back(w);
  j["terminated"] = json::array();
  for (const auto& [w, vs] : a.terminated) {
    json values = json::array();
    for (const auto& v : vs) values.push_back(to_string(v));
    j["terminated"].push_back({{"word", w}, {"values", values}});
  }
  return j;
}

nlohmann::json cost_distribution_to_json(const CostDistribution& d) {
  using nlohmann::json;
  json j;
  j["depth"] = d.depth;
  j["truncated_mass"] = d.truncated_mass;
  j["mass"] = json::array();
  for (const auto& [key, p] : d.mass) {
    j["mass"].push_back({{"cost", key.first}, {"value", to_string(key.second)}, {"probability", p}});
  }
  return j;
}

}  // namespace cpswp
