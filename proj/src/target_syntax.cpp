// Concrete syntax of target formulas: printer and parser.

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "cpswp/error.hpp"
#include "cpswp/signature.hpp"
#include "cpswp/target.hpp"
#include "lexer.hpp"

namespace cpswp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_weight(double w) {
  if (std::isinf(w)) return "inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, w);
    if (std::strtod(buf, nullptr) == w) break;
  }
  return buf;
}

// z occurs in t, if at all, only as fst z / snd z.
bool only_projected(const TargetTerm& t, const std::string& z, bool& seen) {
  if (const auto* p = std::get_if<tterm::Proj>(&t->node)) {
    if (const auto* v = std::get_if<tterm::Var>(&p->arg->node); v && v->name == z) {
      seen = true;
      return true;
    }
  }
  auto sub = [&](const TargetTerm& s) { return only_projected(s, z, seen); };
  auto under = [&](const std::string& b, const TargetTerm& s) { return b == z || sub(s); };
  return std::visit(overloaded{
                        [&](const tterm::Var& v) { return v.name != z; },
                        [&](const tterm::Const& c) { return sub(c.arg); },
                        [&](const tterm::Modal& m) { return sub(m.arg); },
                        [&](const tterm::Pair& p) { return sub(p.first) && sub(p.second); },
                        [&](const tterm::Proj& p) { return sub(p.arg); },
                        [&](const tterm::Absurd& a) { return sub(a.arg); },
                        [&](const tterm::Inj& i) { return sub(i.arg); },
                        [&](const tterm::Case& c) {
                          return sub(c.scrutinee) && under(c.left_binder, c.left) && under(c.right_binder, c.right);
                        },
                        [&](const tterm::Lam& l) { return under(l.binder, l.body); },
                        [&](const tterm::App& a) { return sub(a.fn) && sub(a.arg); },
                        [&](const tterm::LetRecPred& lr) {
                          if (lr.fname == z) return true;
                          return under(lr.binder, lr.body) && sub(lr.rest);
                        },
                        [&](const tterm::Binary& b) { return sub(b.left) && sub(b.right); },
                        [&](const tterm::Quant& q) { return under(q.binder, q.body); },
                        [](const auto&) { return true; },
                    },
                    t->node);
}

// Replaces fst z / snd z by the given variables.
TargetTerm replace_projections(const TargetTerm& t, const std::string& z, const std::string& a, const std::string& b) {
  if (const auto* p = std::get_if<tterm::Proj>(&t->node)) {
    if (const auto* v = std::get_if<tterm::Var>(&p->arg->node); v && v->name == z) {
      return t_var(p->index == 1 ? a : b);
    }
  }
  auto sub = [&](const TargetTerm& s) { return replace_projections(s, z, a, b); };
  auto under = [&](const std::string& bnd, const TargetTerm& s) { return bnd == z ? s : sub(s); };
  return std::visit(
      overloaded{
          [&](const tterm::Const& c) { return make_target(tterm::Const{c.name, sub(c.arg)}); },
          [&](const tterm::Modal& m) { return make_target(tterm::Modal{m.name, m.index, sub(m.arg)}); },
          [&](const tterm::Pair& p) { return t_pair(sub(p.first), sub(p.second)); },
          [&](const tterm::Proj& p) { return t_proj(p.index, sub(p.arg)); },
          [&](const tterm::Absurd& x) { return make_target(tterm::Absurd{sub(x.arg)}); },
          [&](const tterm::Inj& i) { return make_target(tterm::Inj{i.index, i.sum, sub(i.arg)}); },
          [&](const tterm::Case& c) {
            return make_target(tterm::Case{sub(c.scrutinee), c.left_binder, under(c.left_binder, c.left),
                                           c.right_binder, under(c.right_binder, c.right)});
          },
          [&](const tterm::Lam& l) { return t_lam(l.binder, l.type, under(l.binder, l.body), l.hint); },
          [&](const tterm::App& x) { return t_app(sub(x.fn), sub(x.arg)); },
          [&](const tterm::LetRecPred& lr) {
            if (lr.fname == z) return t;
            return make_target(
                tterm::LetRecPred{lr.fname, lr.binder, lr.arg_type, under(lr.binder, lr.body), sub(lr.rest), lr.hint});
          },
          [&](const tterm::Binary& x) { return t_bin(x.op, sub(x.left), sub(x.right)); },
          [&](const tterm::Quant& q) { return make_target(tterm::Quant{q.exists, q.binder, q.type, under(q.binder, q.body)}); },
          [&](const auto&) { return t; },
      },
      t->node);
}

struct PairView {
  std::string first, second;
  TargetTerm body;
};

std::optional<PairView> as_pair_binder(const std::string& z, const TargetTerm& body, const PairHint& hint) {
  bool seen = false;
  if (!only_projected(body, z, seen)) return std::nullopt;
  if (!seen && !hint) return std::nullopt;
  std::set<std::string> taken = all_target_names(body);
  auto pick = [&](const std::string& want, const std::string& base) {
    std::string n = want;
    int i = 0;
    while (n.empty() || taken.count(n)) n = base + std::to_string(++i);
    taken.insert(n);
    return n;
  };
  std::string a = pick(hint ? hint->first : "", z + "_");
  std::string b = pick(hint ? hint->second : "", z + "_");
  return PairView{a, b, replace_projections(body, z, a, b)};
}

// Branches of the n-ary shape (\x:n. delta(x, x1.M1, ..., xn.Mn), ()).
bool match_chain(const TargetTerm& t, const std::string& x, int n, std::vector<TargetTerm>& branches,
                 std::vector<std::string>& binders) {
  binders.push_back(x);
  if (n == 1) {
    branches.push_back(t);
    return true;
  }
  const auto* c = std::get_if<tterm::Case>(&t->node);
  if (!c) return false;
  const auto* v = std::get_if<tterm::Var>(&c->scrutinee->node);
  if (!v || v->name != x) return false;
  if (!match_chain(c->left, c->left_binder, n - 1, branches, binders)) return false;
  binders.push_back(c->right_binder);
  branches.push_back(c->right);
  return true;
}

}  // namespace

bool match_nary_modal(const TargetTerm& arg, int n, std::vector<TargetTerm>& branches) {
  if (n < 1) return false;
  const auto* p = std::get_if<tterm::Pair>(&arg->node);
  if (!p || !std::holds_alternative<tterm::UnitVal>(p->second->node)) return false;
  const auto* l = std::get_if<tterm::Lam>(&p->first->node);
  if (!l) return false;
  if (l->type && !target_type_equal(l->type, ground_to_target(finite_sum_type(n)))) return false;
  std::vector<std::string> binders;
  branches.clear();
  if (!match_chain(l->body, l->binder, n, branches, binders)) return false;
  for (const auto& b : branches) {
    auto fv = free_vars(b);
    for (const auto& name : binders) {
      if (fv.count(name)) return false;
    }
  }
  return true;
}

namespace {

class Printer {
 public:
  Printer(const PrintOptions& opts, const Signature& sig) : opts_(opts), sig_(sig) {}

  // Levels: 0 binders, 1 =>, 2 ||, 3 &&, 4 +, 5 *, 6 application, 7 atoms.
  void print(const TargetTerm& t, int level) {
    std::visit(overloaded{
                   [&](const tterm::Var& v) { out_ += v.name; },
                   [&](const tterm::Const& c) {
                     open(level, 6);
                     out_ += c.name + " ";
                     print(c.arg, 7);
                     close(level, 6);
                   },
                   [&](const tterm::Modal& m) { print_modal(m); },
                   [&](const tterm::UnitVal&) { out_ += "()"; },
                   [&](const tterm::Pair& p) {
                     out_ += "(";
                     print(p.first, 0);
                     out_ += ", ";
                     print(p.second, 0);
                     out_ += ")";
                   },
                   [&](const tterm::Proj& p) {
                     open(level, 6);
                     out_ += p.index == 1 ? "fst " : "snd ";
                     print(p.arg, 7);
                     close(level, 6);
                   },
                   [&](const tterm::Absurd& a) {
                     open(level, 6);
                     out_ += "absurd ";
                     print(a.arg, 7);
                     close(level, 6);
                   },
                   [&](const tterm::Inj& i) {
                     open(level, 6);
                     out_ += i.index == 1 ? "inl [" : "inr [";
                     out_ += to_string(i.sum) + "] ";
                     print(i.arg, 7);
                     close(level, 6);
                   },
                   [&](const tterm::Case& c) {
                     open(level, 0);
                     out_ += "case ";
                     print(c.scrutinee, 0);
                     out_ += " of inl " + c.left_binder + " -> ";
                     print(c.left, 0);
                     out_ += " | inr " + c.right_binder + " -> ";
                     print(c.right, 0);
                     close(level, 0);
                   },
                   [&](const tterm::Lam& l) {
                     open(level, 0);
                     out_ += "\\";
                     const TargetTerm& body = binder(l.binder, l.type, l.body, l.hint);
                     out_ += ". ";
                     print(body, 0);
                     close(level, 0);
                   },
                   [&](const tterm::App& a) {
                     open(level, 6);
                     print(a.fn, 6);
                     out_ += " ";
                     print(a.arg, 7);
                     close(level, 6);
                   },
                   [&](const tterm::LetRecPred& lr) {
                     open(level, 0);
                     out_ += "letrec " + lr.fname + " ";
                     const TargetTerm& body = binder(lr.binder, lr.arg_type, lr.body, lr.hint);
                     out_ += " = ";
                     print(body, 0);
                     out_ += " in ";
                     print(lr.rest, 0);
                     close(level, 0);
                   },
                   [&](const tterm::BoolLit& b) { out_ += b.value ? "true" : "false"; },
                   [&](const tterm::Binary& b) { print_binary(b, level); },
                   [&](const tterm::Quant& q) {
                     open(level, 0);
                     out_ += q.exists ? "exists " : "forall ";
                     out_ += q.binder + ":" + to_string(q.type) + ". ";
                     print(q.body, 0);
                     close(level, 0);
                   },
                   [&](const tterm::WeightLit& w) { out_ += format_weight(w.value); },
               },
               t->node);
  }

  std::string take() { return std::move(out_); }

 private:
  void open(int level, int mine) {
    if (level > mine) out_ += "(";
  }
  void close(int level, int mine) {
    if (level > mine) out_ += ")";
  }

  // Prints the binder part of a lambda or letrec and returns the body to print.
  TargetTerm binder(const std::string& z, const TargetType& type, const TargetTerm& body, const PairHint& hint) {
    TargetTerm shown = body;
    if (auto view = as_pair_binder(z, body, hint)) {
      out_ += "(" + view->first + ", " + view->second + ")";
      shown = view->body;
    } else {
      out_ += z;
    }
    if (opts_.types && type) out_ += ":" + to_string(type);
    return shown;
  }

  void print_binary(const tterm::Binary& b, int level) {
    int mine = 0, lhs = 0, rhs = 0;
    const char* sym = "";
    switch (b.op) {
      case BinOp::Implies:
        mine = 1, lhs = 2, rhs = 1, sym = " => ";
        break;
      case BinOp::Or:
        mine = 2, lhs = 2, rhs = 3, sym = " || ";
        break;
      case BinOp::And:
        mine = 3, lhs = 3, rhs = 4, sym = " && ";
        break;
      case BinOp::Add:
        mine = 4, lhs = 4, rhs = 5, sym = " + ";
        break;
      case BinOp::Mul:
        mine = 5, lhs = 5, rhs = 6, sym = " * ";
        break;
    }
    open(level, mine);
    print(b.left, lhs);
    out_ += sym;
    print(b.right, rhs);
    close(level, mine);
  }

  void print_modal(const tterm::Modal& m) {
    const OperationDecl* decl = sig_.find_operation(m.name, m.index);
    std::vector<TargetTerm> branches;
    const bool nary = decl && decl->nary;
    if (nary && match_nary_modal(m.arg, *decl->nary, branches)) {
      if (m.name == "event" && !m.index.empty() && branches.size() == 1) {
        out_ += "<" + m.index + ">(";
        print(branches[0], 0);
        out_ += ")";
        return;
      }
      out_ += operation_key(m.name, m.index) + "{";
      for (std::size_t i = 0; i < branches.size(); ++i) {
        if (i) out_ += ", ";
        print(branches[i], 0);
      }
      out_ += "}";
      return;
    }
    out_ += operation_key(m.name, m.index) + (nary ? "!{" : "{");
    print(m.arg, 0);
    out_ += "}";
  }

  const PrintOptions& opts_;
  const Signature& sig_;
  std::string out_;
};

// ---------------------------------------------------------------- parser

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

bool reserved(const std::string& s) {
  static const std::set<std::string> words = {"letrec", "in",     "case",  "of",   "inl",   "inr",  "absurd",
                                              "fst",    "snd",    "forall", "exists", "true", "false", "inf"};
  return words.count(s) > 0;
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const Signature& sig) : ts_(detail::tokenize(text)), sig_(sig) {
    TokenStream scan(detail::tokenize(text));
    while (!scan.at_end()) {
      const Token& t = scan.next();
      if (t.kind == TokenKind::Ident) taken_.insert(t.text);
    }
  }

  TargetTerm parse_all() {
    TargetTerm t = formula();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return t;
  }

 private:
  std::string fresh(const std::string& base) {
    std::string n;
    do {
      n = base + std::to_string(counter_++);
    } while (taken_.count(n));
    taken_.insert(n);
    return n;
  }

  std::string name() {
    std::string n = ts_.expect_ident("a name");
    if (reserved(n)) ts_.fail("reserved word '" + n + "'");
    return n;
  }

  TargetType type() {
    TargetType t = type_sum();
    while (ts_.accept_symbol("->")) {
      ts_.expect_keyword("R");
      t = t_pred(t);
    }
    return t;
  }
  TargetType type_sum() {
    TargetType t = type_prod();
    while (ts_.accept_symbol("+")) t = t_sum(t, type_prod());
    return t;
  }
  TargetType type_prod() {
    TargetType t = type_atom();
    while (ts_.accept_symbol("*")) t = t_prod(t, type_atom());
    return t;
  }
  TargetType type_atom() {
    if (ts_.accept_keyword("unit")) return t_unit();
    if (ts_.accept_keyword("empty")) return t_empty();
    if (ts_.accept_symbol("(")) {
      TargetType t = type();
      ts_.expect_symbol(")");
      return t;
    }
    if (ts_.peek().kind == TokenKind::Ident && ts_.peek().text != "R") return t_base(ts_.next().text);
    ts_.fail("expected a type");
  }

  struct Binder {
    std::string name;
    TargetType type;
    PairHint hint;
    std::string first, second;  // pattern components
  };

  Binder binder() {
    Binder b;
    if (ts_.accept_symbol("(")) {
      b.first = name();
      ts_.expect_symbol(",");
      b.second = name();
      ts_.expect_symbol(")");
      b.name = fresh("z");
      b.hint = std::make_pair(b.first, b.second);
    } else {
      b.name = name();
    }
    if (ts_.accept_symbol(":")) b.type = type();
    return b;
  }

  void bind_pattern(const Binder& b) {
    if (b.hint) {
      scope_.push_back({b.first, t_proj(1, t_var(b.name))});
      scope_.push_back({b.second, t_proj(2, t_var(b.name))});
    } else {
      scope_.push_back({b.name, t_var(b.name)});
    }
  }
  void unbind_pattern(const Binder& b) { scope_.resize(scope_.size() - (b.hint ? 2 : 1)); }

  bool starts_binder_form() const {
    return ts_.is_symbol("\\") || ts_.is_keyword("letrec") || ts_.is_keyword("forall") || ts_.is_keyword("exists") ||
           ts_.is_keyword("case");
  }

  TargetTerm formula() {
    if (ts_.accept_symbol("\\")) {
      Binder b = binder();
      ts_.expect_symbol(".");
      bind_pattern(b);
      TargetTerm body = formula();
      unbind_pattern(b);
      return t_lam(b.name, b.type, body, b.hint);
    }
    if (ts_.accept_keyword("letrec")) {
      std::string f = name();
      Binder b = binder();
      ts_.expect_symbol("=");
      scope_.push_back({f, t_var(f)});
      bind_pattern(b);
      TargetTerm body = formula();
      unbind_pattern(b);
      ts_.expect_keyword("in");
      TargetTerm rest = formula();
      scope_.pop_back();
      return make_target(tterm::LetRecPred{f, b.name, b.type, body, rest, b.hint});
    }
    for (bool ex : {false, true}) {
      if (ts_.accept_keyword(ex ? "exists" : "forall")) {
        std::string x = name();
        ts_.expect_symbol(":");
        TargetType ty = type();
        ts_.expect_symbol(".");
        scope_.push_back({x, t_var(x)});
        TargetTerm body = formula();
        scope_.pop_back();
        return make_target(tterm::Quant{ex, x, ty, body});
      }
    }
    if (ts_.accept_keyword("case")) {
      TargetTerm s = formula();
      ts_.expect_keyword("of");
      ts_.expect_keyword("inl");
      std::string x = name();
      ts_.expect_symbol("->");
      scope_.push_back({x, t_var(x)});
      TargetTerm left = formula();
      scope_.pop_back();
      ts_.expect_symbol("|");
      ts_.expect_keyword("inr");
      std::string y = name();
      ts_.expect_symbol("->");
      scope_.push_back({y, t_var(y)});
      TargetTerm right = formula();
      scope_.pop_back();
      return make_target(tterm::Case{s, x, left, y, right});
    }
    return implication();
  }

  TargetTerm operand(TargetTerm (FormulaParser::*next)()) {
    if (starts_binder_form()) return formula();
    return (this->*next)();
  }

  TargetTerm implication() {
    TargetTerm l = disjunction();
    if (ts_.accept_symbol("=>")) return t_bin(BinOp::Implies, l, operand(&FormulaParser::implication));
    return l;
  }
  TargetTerm disjunction() {
    TargetTerm l = conjunction();
    while (ts_.accept_symbol("||")) l = t_bin(BinOp::Or, l, operand(&FormulaParser::conjunction));
    return l;
  }
  TargetTerm conjunction() {
    TargetTerm l = sum();
    while (ts_.accept_symbol("&&")) l = t_bin(BinOp::And, l, operand(&FormulaParser::sum));
    return l;
  }
  TargetTerm sum() {
    TargetTerm l = product();
    while (ts_.accept_symbol("+")) l = t_bin(BinOp::Add, l, operand(&FormulaParser::product));
    return l;
  }
  TargetTerm product() {
    TargetTerm l = application();
    while (ts_.accept_symbol("*")) l = t_bin(BinOp::Mul, l, operand(&FormulaParser::application));
    return l;
  }

  bool starts_atom() const {
    const Token& t = ts_.peek();
    if (t.kind == TokenKind::Number) return true;
    if (t.kind == TokenKind::Symbol) return t.text == "(" || t.text == "<";
    if (t.kind != TokenKind::Ident) return false;
    if (t.text == "true" || t.text == "false" || t.text == "inf") return true;
    return !reserved(t.text);
  }

  TargetTerm application() {
    TargetTerm t = prefixed();
    while (starts_atom()) t = t_app(t, atom());
    return t;
  }

  TargetTerm prefixed() {
    for (int i : {1, 2}) {
      if (ts_.accept_keyword(i == 1 ? "fst" : "snd")) return t_proj(i, atom());
      if (ts_.accept_keyword(i == 1 ? "inl" : "inr")) {
        ts_.expect_symbol("[");
        TargetType ty = type();
        ts_.expect_symbol("]");
        return make_target(tterm::Inj{i, ty, atom()});
      }
    }
    if (ts_.accept_keyword("absurd")) return make_target(tterm::Absurd{atom()});
    if (!starts_atom()) ts_.fail("expected a formula");
    return atom();
  }

  TargetTerm chain(const std::string& x, const std::vector<TargetTerm>& branches, std::size_t n) {
    if (n == 1) return branches[0];
    std::string inner = fresh("c"), last = fresh("c");
    return make_target(tterm::Case{t_var(x), inner, chain(inner, branches, n - 1), last, branches[n - 1]});
  }

  TargetTerm nary(const std::vector<TargetTerm>& branches) {
    std::string x = fresh("x");
    int n = static_cast<int>(branches.size());
    return t_pair(t_lam(x, ground_to_target(finite_sum_type(n)), chain(x, branches, branches.size())), t_unitval());
  }

  TargetTerm modal(const std::string& op) {
    std::string index;
    if (ts_.accept_symbol("[")) {
      const Token& lit = ts_.peek();
      if (lit.kind != TokenKind::Ident && lit.kind != TokenKind::Number) ts_.fail("expected an operation index");
      index = ts_.next().text;
      ts_.expect_symbol("]");
    }
    const Token at = ts_.peek();
    const OperationDecl* decl = sig_.find_operation(op, index);
    if (!decl) throw SyntaxError("unknown operation '" + operation_key(op, index) + "'", at.line, at.column);
    const bool raw = ts_.accept_symbol("!");
    ts_.expect_symbol("{");
    std::vector<TargetTerm> args{formula()};
    while (ts_.accept_symbol(",")) args.push_back(formula());
    ts_.expect_symbol("}");
    if (decl->nary && !raw) {
      if (static_cast<int>(args.size()) != *decl->nary) {
        throw SyntaxError("operation '" + operation_key(op, index) + "' takes " + std::to_string(*decl->nary) +
                              " branch(es)",
                          at.line, at.column);
      }
      return make_target(tterm::Modal{op, index, nary(args)});
    }
    if (args.size() != 1) throw SyntaxError("raw modal application takes one argument", at.line, at.column);
    return make_target(tterm::Modal{op, index, args[0]});
  }

  TargetTerm atom() {
    const Token tok = ts_.peek();
    if (tok.kind == TokenKind::Number) {
      ts_.next();
      return t_weight(std::strtod(tok.text.c_str(), nullptr));
    }
    if (ts_.accept_keyword("true")) return t_true();
    if (ts_.accept_keyword("false")) return t_false();
    if (ts_.accept_keyword("inf")) return t_weight(INFINITY);
    if (ts_.accept_symbol("<")) {
      const Token& lit = ts_.peek();
      if (lit.kind != TokenKind::Ident && lit.kind != TokenKind::Number) ts_.fail("expected an event name");
      std::string a = ts_.next().text;
      ts_.expect_symbol(">");
      ts_.expect_symbol("(");
      TargetTerm body = formula();
      ts_.expect_symbol(")");
      return make_target(tterm::Modal{"event", a, nary({body})});
    }
    if (ts_.accept_symbol("(")) {
      if (ts_.accept_symbol(")")) return t_unitval();
      TargetTerm first = formula();
      if (ts_.accept_symbol(",")) {
        TargetTerm second = formula();
        ts_.expect_symbol(")");
        return t_pair(first, second);
      }
      ts_.expect_symbol(")");
      return first;
    }
    std::string n = name();
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == n) return it->second;
    }
    if (sig_.has_operation_name(n) && (ts_.is_symbol("{") || ts_.is_symbol("[") || ts_.is_symbol("!"))) {
      return modal(n);
    }
    if (sig_.find_constant(n) && starts_atom()) return make_target(tterm::Const{n, atom()});
    return t_var(n);
  }

  TokenStream ts_;
  const Signature& sig_;
  std::set<std::string> taken_;
  std::vector<std::pair<std::string, TargetTerm>> scope_;
  int counter_ = 0;
};

}  // namespace

std::string pretty_print(const TargetTerm& term, const PrintOptions& opts) {
  static const Signature all = builtin_signature("all");
  Printer p(opts, opts.sig ? *opts.sig : all);
  p.print(term, 0);
  return p.take();
}

TargetTerm parse_target(std::string_view text, const Signature& sig) { return FormulaParser(text, sig).parse_all(); }

}  // namespace cpswp
