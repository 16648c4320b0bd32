#include "cpswp/source.hpp"

#include <functional>
#include <sstream>

#include "cpswp/error.hpp"

namespace cpswp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

SourceType make_type(decltype(SourceTypeNode::node) node) {
  return std::make_shared<const SourceTypeNode>(SourceTypeNode{std::move(node)});
}

}  // namespace

SourceType base_type(std::string name) { return make_type(stype::Base{std::move(name)}); }

SourceType unit_type() {
  static const SourceType t = make_type(stype::Unit{});
  return t;
}

SourceType empty_type() {
  static const SourceType t = make_type(stype::Empty{});
  return t;
}

SourceType prod_type(SourceType left, SourceType right) {
  return make_type(stype::Prod{std::move(left), std::move(right)});
}

SourceType sum_type(SourceType left, SourceType right) {
  return make_type(stype::Sum{std::move(left), std::move(right)});
}

SourceType arrow_type(SourceType from, SourceType to) {
  return make_type(stype::Arrow{std::move(from), std::move(to)});
}

SourceType finite_sum_type(int n) {
  if (n <= 0) return empty_type();
  SourceType t = unit_type();
  for (int i = 1; i < n; ++i) t = sum_type(t, unit_type());
  return t;
}

std::optional<int> finite_sum_size(const SourceType& t) {
  if (std::holds_alternative<stype::Empty>(t->node)) return 0;
  if (std::holds_alternative<stype::Unit>(t->node)) return 1;
  if (const auto* s = std::get_if<stype::Sum>(&t->node)) {
    if (!std::holds_alternative<stype::Unit>(s->right->node)) return std::nullopt;
    auto inner = finite_sum_size(s->left);
    // 0 + 1 is not one of the canonical shapes.
    if (!inner || *inner == 0) return std::nullopt;
    return *inner + 1;
  }
  return std::nullopt;
}

bool type_equal(const SourceType& a, const SourceType& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->node.index() != b->node.index()) return false;
  return std::visit(
      overloaded{
          [&](const stype::Base& x) { return x.name == std::get<stype::Base>(b->node).name; },
          [](const stype::Unit&) { return true; },
          [](const stype::Empty&) { return true; },
          [&](const stype::Prod& x) {
            const auto& y = std::get<stype::Prod>(b->node);
            return type_equal(x.left, y.left) && type_equal(x.right, y.right);
          },
          [&](const stype::Sum& x) {
            const auto& y = std::get<stype::Sum>(b->node);
            return type_equal(x.left, y.left) && type_equal(x.right, y.right);
          },
          [&](const stype::Arrow& x) {
            const auto& y = std::get<stype::Arrow>(b->node);
            return type_equal(x.from, y.from) && type_equal(x.to, y.to);
          }},
      a->node);
}

bool is_ground(const SourceType& t) {
  return std::visit(overloaded{[](const stype::Prod& p) { return is_ground(p.left) && is_ground(p.right); },
                               [](const stype::Sum& s) { return is_ground(s.left) && is_ground(s.right); },
                               [](const stype::Arrow&) { return false; },
                               [](const auto&) { return true; }},
                    t->node);
}

bool is_product_ground(const SourceType& t) {
  return std::visit(
      overloaded{[](const stype::Prod& p) { return is_product_ground(p.left) && is_product_ground(p.right); },
                 [](const stype::Base&) { return true; }, [](const stype::Unit&) { return true; },
                 [](const auto&) { return false; }},
      t->node);
}

namespace {

// 0: arrow, 1: sum, 2: product, 3: atom
void print_type(std::ostream& os, const SourceType& t, int level) {
  if (!t) {
    os << "?";
    return;
  }
  std::visit(overloaded{[&](const stype::Base& b) { os << b.name; },
                        [&](const stype::Unit&) { os << "unit"; },
                        [&](const stype::Empty&) { os << "empty"; },
                        [&](const stype::Prod& p) {
                          if (level > 2) os << "(";
                          print_type(os, p.left, 2);
                          os << " * ";
                          print_type(os, p.right, 3);
                          if (level > 2) os << ")";
                        },
                        [&](const stype::Sum& s) {
                          if (level > 1) os << "(";
                          print_type(os, s.left, 1);
                          os << " + ";
                          print_type(os, s.right, 2);
                          if (level > 1) os << ")";
                        },
                        [&](const stype::Arrow& a) {
                          if (level > 0) os << "(";
                          print_type(os, a.from, 1);
                          os << " -> ";
                          print_type(os, a.to, 0);
                          if (level > 0) os << ")";
                        }},
             t->node);
}

}  // namespace

std::string to_string(const SourceType& t) {
  std::ostringstream os;
  print_type(os, t, 0);
  return os.str();
}

SourceTerm s_var(std::string name) { return make_source(sterm::Var{std::move(name)}); }
SourceTerm s_unit() { return make_source(sterm::UnitVal{}); }
SourceTerm s_pair(SourceTerm a, SourceTerm b) { return make_source(sterm::Pair{std::move(a), std::move(b)}); }
SourceTerm s_lam(std::string binder, SourceType type, SourceTerm body) {
  return make_source(sterm::Lam{std::move(binder), std::move(type), std::move(body)});
}
SourceTerm s_app(SourceTerm fn, SourceTerm arg) { return make_source(sterm::App{std::move(fn), std::move(arg)}); }

std::string operation_key(const std::string& name, const std::string& index) {
  return index.empty() ? name : name + "[" + index + "]";
}

const ConstantDecl* Signature::find_constant(const std::string& name) const {
  auto it = constants.find(name);
  return it == constants.end() ? nullptr : &it->second;
}

const OperationDecl* Signature::find_operation(const std::string& name, const std::string& index) const {
  if (!index.empty()) {
    auto exact = operations.find(operation_key(name, index));
    if (exact != operations.end()) return &exact->second;
    auto family = operations.find(name);
    if (family != operations.end() && family->second.indexed) return &family->second;
    return nullptr;
  }
  auto it = operations.find(name);
  if (it == operations.end() || it->second.indexed) return nullptr;
  return &it->second;
}

bool Signature::has_operation_name(const std::string& name) const {
  if (operations.count(name)) return true;
  const std::string prefix = name + "[";
  auto it = operations.lower_bound(prefix);
  return it != operations.end() && it->first.compare(0, prefix.size(), prefix) == 0;
}

const SourceType* TypingContext::lookup(const std::string& name) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

TypingContext TypingContext::extended(const std::string& name, SourceType type) const {
  if (contains(name)) throw TypeError("variable '" + name + "' is already bound in the context");
  TypingContext out = *this;
  out.entries_.emplace_back(name, std::move(type));
  return out;
}

namespace {

void collect_free(const SourceTerm& t, std::set<std::string>& bound, std::set<std::string>& out) {
  auto under = [&](const std::vector<std::string>& names, const SourceTerm& body) {
    std::vector<std::string> added;
    for (const auto& n : names) {
      if (bound.insert(n).second) added.push_back(n);
    }
    collect_free(body, bound, out);
    for (const auto& n : added) bound.erase(n);
  };
  std::visit(overloaded{[&](const sterm::Var& v) {
                          if (!bound.count(v.name)) out.insert(v.name);
                        },
                        [&](const sterm::Const& c) { collect_free(c.arg, bound, out); },
                        [&](const sterm::Op& o) { collect_free(o.arg, bound, out); },
                        [&](const sterm::UnitVal&) {},
                        [&](const sterm::Pair& p) {
                          collect_free(p.first, bound, out);
                          collect_free(p.second, bound, out);
                        },
                        [&](const sterm::Proj& p) { collect_free(p.arg, bound, out); },
                        [&](const sterm::Absurd& a) { collect_free(a.arg, bound, out); },
                        [&](const sterm::Inj& i) { collect_free(i.arg, bound, out); },
                        [&](const sterm::Case& c) {
                          collect_free(c.scrutinee, bound, out);
                          under({c.left_binder}, c.left);
                          under({c.right_binder}, c.right);
                        },
                        [&](const sterm::Lam& l) { under({l.binder}, l.body); },
                        [&](const sterm::App& a) {
                          collect_free(a.fn, bound, out);
                          collect_free(a.arg, bound, out);
                        },
                        [&](const sterm::LetRec& r) {
                          under({r.fname, r.binder}, r.body);
                          under({r.fname}, r.rest);
                        }},
             t->node);
}

void collect_names(const SourceTerm& t, std::set<std::string>& out) {
  std::visit(overloaded{[&](const sterm::Var& v) { out.insert(v.name); },
                        [&](const sterm::Const& c) { collect_names(c.arg, out); },
                        [&](const sterm::Op& o) { collect_names(o.arg, out); },
                        [&](const sterm::UnitVal&) {},
                        [&](const sterm::Pair& p) {
                          collect_names(p.first, out);
                          collect_names(p.second, out);
                        },
                        [&](const sterm::Proj& p) { collect_names(p.arg, out); },
                        [&](const sterm::Absurd& a) { collect_names(a.arg, out); },
                        [&](const sterm::Inj& i) { collect_names(i.arg, out); },
                        [&](const sterm::Case& c) {
                          collect_names(c.scrutinee, out);
                          out.insert(c.left_binder);
                          out.insert(c.right_binder);
                          collect_names(c.left, out);
                          collect_names(c.right, out);
                        },
                        [&](const sterm::Lam& l) {
                          out.insert(l.binder);
                          collect_names(l.body, out);
                        },
                        [&](const sterm::App& a) {
                          collect_names(a.fn, out);
                          collect_names(a.arg, out);
                        },
                        [&](const sterm::LetRec& r) {
                          out.insert(r.fname);
                          out.insert(r.binder);
                          collect_names(r.body, out);
                          collect_names(r.rest, out);
                        }},
             t->node);
}

}  // namespace

std::set<std::string> free_vars(const SourceTerm& term) {
  std::set<std::string> bound, out;
  collect_free(term, bound, out);
  return out;
}

std::set<std::string> all_names(const SourceTerm& term) {
  std::set<std::string> out;
  collect_names(term, out);
  return out;
}

namespace {

bool occurs_free(const std::string& name, const SourceTerm& t) { return free_vars(t).count(name) > 0; }

// Recognises delta(x, x1.M1, ..., xn.Mn) and returns the branches.
bool match_case_chain(const SourceTerm& t, const std::string& x, int n, std::vector<SourceTerm>& branches) {
  if (n == 1) {
    branches.push_back(t);
    return true;
  }
  const auto* c = std::get_if<sterm::Case>(&t->node);
  if (!c) return false;
  const auto* scrut = std::get_if<sterm::Var>(&c->scrutinee->node);
  if (!scrut || scrut->name != x) return false;
  if (occurs_free(c->right_binder, c->right)) return false;
  if (n > 2 && !match_case_chain(c->left, c->left_binder, n - 1, branches)) return false;
  if (n == 2) {
    if (occurs_free(c->left_binder, c->left)) return false;
    branches.push_back(c->left);
  }
  branches.push_back(c->right);
  return true;
}

}  // namespace

bool match_nary_sugar(const SourceTerm& arg, std::vector<SourceTerm>& branches) {
  const auto* pair = std::get_if<sterm::Pair>(&arg->node);
  if (!pair || !std::holds_alternative<sterm::UnitVal>(pair->second->node)) return false;
  const auto* lam = std::get_if<sterm::Lam>(&pair->first->node);
  if (!lam || !lam->type) return false;
  auto n = finite_sum_size(lam->type);
  if (!n || *n < 1) return false;
  branches.clear();
  if (!match_case_chain(lam->body, lam->binder, *n, branches)) return false;
  for (const auto& b : branches) {
    if (occurs_free(lam->binder, b)) return false;
  }
  return true;
}

namespace {

// 0: binder forms, 1: application, 2: atom
void print_term(std::ostream& os, const SourceTerm& t, int level) {
  auto open = [&](int needed) {
    if (level > needed) os << "(";
  };
  auto close = [&](int needed) {
    if (level > needed) os << ")";
  };
  std::visit(overloaded{[&](const sterm::Var& v) { os << v.name; },
                        [&](const sterm::Const& c) {
                          open(1);
                          os << c.name << " ";
                          print_term(os, c.arg, 2);
                          close(1);
                        },
                        [&](const sterm::Op& o) {
                          os << operation_key(o.name, o.index) << "(";
                          std::vector<SourceTerm> branches;
                          if (match_nary_sugar(o.arg, branches)) {
                            for (std::size_t i = 0; i < branches.size(); ++i) {
                              if (i) os << ", ";
                              print_term(os, branches[i], 0);
                            }
                          } else {
                            print_term(os, o.arg, 0);
                          }
                          os << ")";
                        },
                        [&](const sterm::UnitVal&) { os << "()"; },
                        [&](const sterm::Pair& p) {
                          os << "(";
                          print_term(os, p.first, 0);
                          os << ", ";
                          print_term(os, p.second, 0);
                          os << ")";
                        },
                        [&](const sterm::Proj& p) {
                          open(1);
                          os << (p.index == 1 ? "fst " : "snd ");
                          print_term(os, p.arg, 2);
                          close(1);
                        },
                        [&](const sterm::Absurd& a) {
                          open(0);
                          os << "absurd ";
                          print_term(os, a.arg, 0);
                          close(0);
                        },
                        [&](const sterm::Inj& i) {
                          open(1);
                          os << (i.index == 1 ? "inl [" : "inr [") << to_string(i.sum) << "] ";
                          print_term(os, i.arg, 2);
                          close(1);
                        },
                        [&](const sterm::Case& c) {
                          open(0);
                          os << "case ";
                          print_term(os, c.scrutinee, 0);
                          os << " of inl " << c.left_binder << " -> ";
                          print_term(os, c.left, 1);
                          os << " | inr " << c.right_binder << " -> ";
                          print_term(os, c.right, 0);
                          close(0);
                        },
                        [&](const sterm::Lam& l) {
                          open(0);
                          os << "fun " << l.binder << ":" << to_string(l.type) << ". ";
                          print_term(os, l.body, 0);
                          close(0);
                        },
                        [&](const sterm::App& a) {
                          open(1);
                          print_term(os, a.fn, 1);
                          os << " ";
                          print_term(os, a.arg, 2);
                          close(1);
                        },
                        [&](const sterm::LetRec& r) {
                          open(0);
                          os << "letrec " << r.fname << " " << r.binder << " = ";
                          print_term(os, r.body, 0);
                          os << " in ";
                          print_term(os, r.rest, 0);
                          close(0);
                        }},
             t->node);
}

}  // namespace

std::string print_source(const SourceTerm& term) {
  std::ostringstream os;
  print_term(os, term, 0);
  return os.str();
}

namespace {

using Scope = std::vector<std::pair<std::string, std::string>>;

bool same_var(const Scope& scope, const std::string& a, const std::string& b) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    if (it->first == a || it->second == b) return it->first == a && it->second == b;
  }
  return a == b;
}

bool opt_type_equal(const SourceType& a, const SourceType& b) { return !a || !b || type_equal(a, b); }

bool alpha(const SourceTerm& a, const SourceTerm& b, Scope& scope) {
  if (a->node.index() != b->node.index()) return false;
  auto under = [&](std::vector<std::pair<std::string, std::string>> binds, const SourceTerm& x,
                   const SourceTerm& y) {
    for (auto& p : binds) scope.push_back(p);
    bool ok = alpha(x, y, scope);
    scope.resize(scope.size() - binds.size());
    return ok;
  };
  return std::visit(
      overloaded{[&](const sterm::Var& x) { return same_var(scope, x.name, std::get<sterm::Var>(b->node).name); },
                 [&](const sterm::Const& x) {
                   const auto& y = std::get<sterm::Const>(b->node);
                   return x.name == y.name && alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::Op& x) {
                   const auto& y = std::get<sterm::Op>(b->node);
                   return x.name == y.name && x.index == y.index && opt_type_equal(x.result, y.result) &&
                          alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::UnitVal&) { return true; },
                 [&](const sterm::Pair& x) {
                   const auto& y = std::get<sterm::Pair>(b->node);
                   return alpha(x.first, y.first, scope) && alpha(x.second, y.second, scope);
                 },
                 [&](const sterm::Proj& x) {
                   const auto& y = std::get<sterm::Proj>(b->node);
                   return x.index == y.index && alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::Absurd& x) {
                   const auto& y = std::get<sterm::Absurd>(b->node);
                   return opt_type_equal(x.result, y.result) && alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::Inj& x) {
                   const auto& y = std::get<sterm::Inj>(b->node);
                   return x.index == y.index && opt_type_equal(x.sum, y.sum) && alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::Case& x) {
                   const auto& y = std::get<sterm::Case>(b->node);
                   return alpha(x.scrutinee, y.scrutinee, scope) &&
                          under({{x.left_binder, y.left_binder}}, x.left, y.left) &&
                          under({{x.right_binder, y.right_binder}}, x.right, y.right);
                 },
                 [&](const sterm::Lam& x) {
                   const auto& y = std::get<sterm::Lam>(b->node);
                   return opt_type_equal(x.type, y.type) && under({{x.binder, y.binder}}, x.body, y.body);
                 },
                 [&](const sterm::App& x) {
                   const auto& y = std::get<sterm::App>(b->node);
                   return alpha(x.fn, y.fn, scope) && alpha(x.arg, y.arg, scope);
                 },
                 [&](const sterm::LetRec& x) {
                   const auto& y = std::get<sterm::LetRec>(b->node);
                   return opt_type_equal(x.arg_type, y.arg_type) && opt_type_equal(x.result_type, y.result_type) &&
                          under({{x.fname, y.fname}, {x.binder, y.binder}}, x.body, y.body) &&
                          under({{x.fname, y.fname}}, x.rest, y.rest);
                 }},
      a->node);
}

}  // namespace

bool source_alpha_equal(const SourceTerm& a, const SourceTerm& b) {
  Scope scope;
  return alpha(a, b, scope);
}

}  // namespace cpswp
