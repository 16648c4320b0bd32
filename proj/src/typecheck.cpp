#include "cpswp/typecheck.hpp"

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

// Inference types: source types plus metavariables.
struct ITypeNode;
using IType = std::shared_ptr<const ITypeNode>;

enum class IKind { Meta, Base, Unit, Empty, Prod, Sum, Arrow };

struct ITypeNode {
  IKind kind;
  int meta = -1;
  std::string name;
  IType a, b;
};

IType mk(IKind k, IType a = nullptr, IType b = nullptr) {
  return std::make_shared<const ITypeNode>(ITypeNode{k, -1, "", std::move(a), std::move(b)});
}

class Inference {
 public:
  explicit Inference(const Signature& sig) : sig_(sig) {}

  IType fresh() {
    solution_.push_back(nullptr);
    auto n = std::make_shared<ITypeNode>();
    n->kind = IKind::Meta;
    n->meta = static_cast<int>(solution_.size()) - 1;
    return n;
  }

  IType lift(const SourceType& t) {
    if (!t) return fresh();
    return std::visit(overloaded{
                          [&](const stype::Base& b) {
                            auto n = std::make_shared<ITypeNode>();
                            n->kind = IKind::Base;
                            n->name = b.name;
                            return IType(n);
                          },
                          [&](const stype::Unit&) { return mk(IKind::Unit); },
                          [&](const stype::Empty&) { return mk(IKind::Empty); },
                          [&](const stype::Prod& p) { return mk(IKind::Prod, lift(p.left), lift(p.right)); },
                          [&](const stype::Sum& s) { return mk(IKind::Sum, lift(s.left), lift(s.right)); },
                          [&](const stype::Arrow& a) { return mk(IKind::Arrow, lift(a.from), lift(a.to)); },
                      },
                      t->node);
  }

  IType resolve(IType t) const {
    while (t->kind == IKind::Meta && solution_[t->meta]) t = solution_[t->meta];
    return t;
  }

  // Unconstrained metavariables become unit.
  SourceType lower(const IType& raw) const {
    IType t = resolve(raw);
    switch (t->kind) {
      case IKind::Meta:
      case IKind::Unit:
        return unit_type();
      case IKind::Base:
        return base_type(t->name);
      case IKind::Empty:
        return empty_type();
      case IKind::Prod:
        return prod_type(lower(t->a), lower(t->b));
      case IKind::Sum:
        return sum_type(lower(t->a), lower(t->b));
      case IKind::Arrow:
        return arrow_type(lower(t->a), lower(t->b));
    }
    return unit_type();
  }

  std::string show(const IType& raw) const {
    IType t = resolve(raw);
    switch (t->kind) {
      case IKind::Meta:
        return "?" + std::to_string(t->meta);
      case IKind::Unit:
        return "unit";
      case IKind::Empty:
        return "empty";
      case IKind::Base:
        return t->name;
      case IKind::Prod:
        return "(" + show(t->a) + " * " + show(t->b) + ")";
      case IKind::Sum:
        return "(" + show(t->a) + " + " + show(t->b) + ")";
      case IKind::Arrow:
        return "(" + show(t->a) + " -> " + show(t->b) + ")";
    }
    return "?";
  }

  // expected vs found
  void unify(const IType& expected, const IType& found) {
    if (!unify_rec(expected, found)) {
      fail("type mismatch: expected " + show(expected) + ", found " + show(found));
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::string where;
    for (const auto& p : path_) where += (where.empty() ? "" : "/") + p;
    throw TypeError(msg + " at " + (where.empty() ? "<root>" : where));
  }

  struct Scoped {
    Inference& inf;
    Scoped(Inference& i, std::string step) : inf(i) { inf.path_.push_back(std::move(step)); }
    ~Scoped() { inf.path_.pop_back(); }
  };

  using Env = std::vector<std::pair<std::string, IType>>;

  struct Result {
    SourceTerm term;  // annotations still as metas; fixed up by finish()
    IType type;
  };

  // Annotations to fill once unification is complete.
  struct Pending {
    const SourceTermNode* node;
    IType a, b;
  };

  IType infer(const SourceTerm& t, Env& env) {
    return std::visit(
        overloaded{
            [&](const sterm::Var& v) -> IType {
              for (auto it = env.rbegin(); it != env.rend(); ++it) {
                if (it->first == v.name) return it->second;
              }
              fail("unbound variable '" + v.name + "'");
            },
            [&](const sterm::Const& c) -> IType {
              const ConstantDecl* d = sig_.find_constant(c.name);
              if (!d) fail("unknown constant '" + c.name + "'");
              Scoped s(*this, c.name);
              unify(lift(d->arity), infer(c.arg, env));
              return lift(d->coarity);
            },
            [&](const sterm::Op& o) -> IType {
              const OperationDecl* d = sig_.find_operation(o.name, o.index);
              if (!d) fail("unknown operation '" + operation_key(o.name, o.index) + "'");
              IType rho = lift(o.result);
              Scoped s(*this, operation_key(o.name, o.index));
              unify(mk(IKind::Prod, mk(IKind::Arrow, lift(d->arity), rho), lift(d->coarity)), infer(o.arg, env));
              pending_.emplace(t.get(), Pending{t.get(), rho, nullptr});
              return rho;
            },
            [&](const sterm::UnitVal&) -> IType { return mk(IKind::Unit); },
            [&](const sterm::Pair& p) -> IType {
              IType a, b;
              {
                Scoped s(*this, "fst");
                a = infer(p.first, env);
              }
              {
                Scoped s(*this, "snd");
                b = infer(p.second, env);
              }
              return mk(IKind::Prod, a, b);
            },
            [&](const sterm::Proj& p) -> IType {
              IType a = fresh(), b = fresh();
              Scoped s(*this, p.index == 1 ? "proj1" : "proj2");
              unify(mk(IKind::Prod, a, b), infer(p.arg, env));
              return p.index == 1 ? a : b;
            },
            [&](const sterm::Absurd& a) -> IType {
              Scoped s(*this, "absurd");
              unify(mk(IKind::Empty), infer(a.arg, env));
              IType r = lift(a.result);
              pending_.emplace(t.get(), Pending{t.get(), r, nullptr});
              return r;
            },
            [&](const sterm::Inj& i) -> IType {
              IType full = lift(i.sum);
              IType l = fresh(), r = fresh();
              Scoped s(*this, i.index == 1 ? "inl" : "inr");
              if (!unify_rec(mk(IKind::Sum, l, r), full)) {
                fail("injection annotated with non-sum type " + show(full));
              }
              unify(i.index == 1 ? l : r, infer(i.arg, env));
              return full;
            },
            [&](const sterm::Case& c) -> IType {
              IType l = fresh(), r = fresh();
              {
                Scoped s(*this, "case.scrutinee");
                unify(mk(IKind::Sum, l, r), infer(c.scrutinee, env));
              }
              IType lt, rt;
              {
                Scoped s(*this, "case.inl");
                env.emplace_back(c.left_binder, l);
                lt = infer(c.left, env);
                env.pop_back();
              }
              {
                Scoped s(*this, "case.inr");
                env.emplace_back(c.right_binder, r);
                rt = infer(c.right, env);
                env.pop_back();
                unify(lt, rt);
              }
              return lt;
            },
            [&](const sterm::Lam& l) -> IType {
              IType a = lift(l.type);
              Scoped s(*this, "fun " + l.binder);
              env.emplace_back(l.binder, a);
              IType b = infer(l.body, env);
              env.pop_back();
              return mk(IKind::Arrow, a, b);
            },
            [&](const sterm::App& a) -> IType {
              IType fn, arg;
              {
                Scoped s(*this, "app.fn");
                fn = infer(a.fn, env);
              }
              {
                Scoped s(*this, "app.arg");
                arg = infer(a.arg, env);
              }
              IType r = fresh();
              Scoped s(*this, "app");
              IType rf = resolve(fn);
              if (rf->kind != IKind::Meta && rf->kind != IKind::Arrow) {
                fail("type mismatch: expected a function, found " + show(fn));
              }
              unify(mk(IKind::Arrow, arg, r), fn);
              return r;
            },
            [&](const sterm::LetRec& lr) -> IType {
              IType a = lift(lr.arg_type), r = lift(lr.result_type);
              pending_.emplace(t.get(), Pending{t.get(), a, r});
              env.emplace_back(lr.fname, mk(IKind::Arrow, a, r));
              {
                Scoped s(*this, "letrec " + lr.fname);
                env.emplace_back(lr.binder, a);
                unify(r, infer(lr.body, env));
                env.pop_back();
              }
              Scoped s(*this, "letrec.in");
              IType out = infer(lr.rest, env);
              env.pop_back();
              return out;
            },
        },
        t->node);
  }

  SourceTerm finish(const SourceTerm& t) {
    auto ann = [&](const SourceTermNode* n) -> const Pending* { return &pending_.at(n); };
    return std::visit(
        overloaded{
            [&](const sterm::Var&) { return t; },
            [&](const sterm::UnitVal&) { return t; },
            [&](const sterm::Const& c) { return make_source(sterm::Const{c.name, finish(c.arg)}); },
            [&](const sterm::Op& o) {
              const Pending* p = ann(t.get());
              return make_source(sterm::Op{o.name, o.index, lower(p->a), finish(o.arg)});
            },
            [&](const sterm::Pair& p) { return s_pair(finish(p.first), finish(p.second)); },
            [&](const sterm::Proj& p) { return make_source(sterm::Proj{p.index, finish(p.arg)}); },
            [&](const sterm::Absurd& a) {
              const Pending* p = ann(t.get());
              return make_source(sterm::Absurd{finish(a.arg), lower(p->a)});
            },
            [&](const sterm::Inj& i) { return make_source(sterm::Inj{i.index, i.sum, finish(i.arg)}); },
            [&](const sterm::Case& c) {
              return make_source(
                  sterm::Case{finish(c.scrutinee), c.left_binder, finish(c.left), c.right_binder, finish(c.right)});
            },
            [&](const sterm::Lam& l) { return s_lam(l.binder, l.type, finish(l.body)); },
            [&](const sterm::App& a) { return s_app(finish(a.fn), finish(a.arg)); },
            [&](const sterm::LetRec& lr) {
              const Pending* p = ann(t.get());
              return make_source(sterm::LetRec{lr.fname, lr.binder, lower(p->a), lower(p->b), finish(lr.body),
                                               finish(lr.rest)});
            },
        },
        t->node);
  }

 private:
  bool occurs(int meta, const IType& raw) const {
    IType t = resolve(raw);
    if (t->kind == IKind::Meta) return t->meta == meta;
    return (t->a && occurs(meta, t->a)) || (t->b && occurs(meta, t->b));
  }

  bool unify_rec(const IType& x0, const IType& y0) {
    IType x = resolve(x0), y = resolve(y0);
    if (x == y) return true;
    if (x->kind == IKind::Meta) {
      if (y->kind == IKind::Meta && y->meta == x->meta) return true;
      if (occurs(x->meta, y)) return false;
      solution_[x->meta] = y;
      return true;
    }
    if (y->kind == IKind::Meta) return unify_rec(y, x);
    if (x->kind != y->kind) return false;
    switch (x->kind) {
      case IKind::Base:
        return x->name == y->name;
      case IKind::Unit:
      case IKind::Empty:
        return true;
      default:
        return unify_rec(x->a, y->a) && unify_rec(x->b, y->b);
    }
  }

  const Signature& sig_;
  std::vector<IType> solution_;
  std::vector<std::string> path_;
  std::unordered_map<const SourceTermNode*, Pending> pending_;
};

}  // namespace

Elaborated elaborate(const Signature& sig, const TypingContext& ctx, const SourceTerm& term) {
  Inference inf(sig);
  Inference::Env env;
  for (const auto& [name, type] : ctx.entries()) env.emplace_back(name, inf.lift(type));
  IType t = inf.infer(term, env);
  return Elaborated{inf.finish(term), inf.lower(t)};
}

SourceType typecheck(const Signature& sig, const TypingContext& ctx, const SourceTerm& term) {
  return elaborate(sig, ctx, term).type;
}

}  // namespace cpswp
