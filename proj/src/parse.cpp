#include "cpswp/parse.hpp"

#include <fstream>
#include <sstream>

#include "cpswp/error.hpp"
#include "lexer.hpp"

namespace cpswp {

namespace {

using detail::Token;
using detail::TokenKind;
using detail::TokenStream;

bool is_reserved(const std::string& s) {
  static const std::set<std::string> words = {"fun", "letrec", "in",    "case", "of",   "inl",
                                              "inr", "absurd", "fst",   "snd",  "unit", "empty"};
  return words.count(s) > 0;
}

class TypeParser {
 public:
  TypeParser(TokenStream& ts, const Signature& sig) : ts_(ts), sig_(sig) {}

  SourceType parse() {
    SourceType t = parse_sum();
    if (ts_.accept_symbol("->")) return arrow_type(t, parse());
    return t;
  }

 private:
  SourceType parse_sum() {
    SourceType t = parse_prod();
    while (ts_.accept_symbol("+")) t = sum_type(t, parse_prod());
    return t;
  }
  SourceType parse_prod() {
    SourceType t = parse_atom();
    while (ts_.accept_symbol("*")) t = prod_type(t, parse_atom());
    return t;
  }
  SourceType parse_atom() {
    if (ts_.accept_keyword("unit")) return unit_type();
    if (ts_.accept_keyword("empty")) return empty_type();
    if (ts_.accept_symbol("(")) {
      SourceType t = parse();
      ts_.expect_symbol(")");
      return t;
    }
    if (ts_.peek().kind == TokenKind::Ident && !is_reserved(ts_.peek().text)) {
      if (!sig_.base_types.count(ts_.peek().text)) ts_.fail("unknown base type");
      return base_type(ts_.next().text);
    }
    ts_.fail("expected a type");
  }

  TokenStream& ts_;
  const Signature& sig_;
};

class ProgramParser {
 public:
  ProgramParser(std::string_view text, const Signature& sig, const std::set<std::string>& free_names)
      : ts_(detail::tokenize(text)), sig_(sig), free_names_(free_names) {
    // Fresh names must not collide with anything written in the program.
    detail::TokenStream scan(detail::tokenize(text));
    while (!scan.at_end()) {
      const Token& t = scan.next();
      if (t.kind == TokenKind::Ident) taken_.insert(t.text);
    }
  }

  SourceTerm parse_all() {
    SourceTerm t = parse_term();
    if (!ts_.at_end()) ts_.fail("unexpected trailing input");
    return t;
  }

 private:
  std::string fresh(const std::string& base) {
    std::string candidate;
    do {
      candidate = base + "_" + std::to_string(++counter_);
    } while (taken_.count(candidate));
    taken_.insert(candidate);
    return candidate;
  }

  // The first binder of a name keeps it; later ones are renamed apart.
  std::string bind(const std::string& name) {
    std::string renamed = name;
    if (!binders_.insert(name).second || free_names_.count(name)) renamed = fresh(name);
    scope_.emplace_back(name, renamed);
    return renamed;
  }
  void unbind(std::size_t n) { scope_.resize(scope_.size() - n); }

  const std::string* lookup_local(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return &it->second;
    }
    return nullptr;
  }

  SourceType parse_type() { return TypeParser(ts_, sig_).parse(); }

  std::string binder_name() {
    std::string name = ts_.expect_ident("a binder name");
    if (is_reserved(name)) ts_.fail("reserved word '" + name + "' cannot be a binder");
    return name;
  }

  SourceTerm parse_term() {
    if (ts_.accept_keyword("fun")) {
      std::string x = binder_name();
      ts_.expect_symbol(":");
      SourceType ty = parse_type();
      ts_.expect_symbol(".");
      std::string rx = bind(x);
      SourceTerm body = parse_term();
      unbind(1);
      return make_source(sterm::Lam{rx, ty, body});
    }
    if (ts_.accept_keyword("letrec")) {
      std::string f = binder_name();
      std::string x = binder_name();
      ts_.expect_symbol("=");
      std::string rf = bind(f);
      std::string rx = bind(x);
      SourceTerm body = parse_term();
      unbind(1);
      ts_.expect_keyword("in");
      SourceTerm rest = parse_term();
      unbind(1);
      return make_source(sterm::LetRec{rf, rx, nullptr, nullptr, body, rest});
    }
    if (ts_.accept_keyword("case")) {
      SourceTerm scrut = parse_term();
      ts_.expect_keyword("of");
      ts_.expect_keyword("inl");
      std::string x1 = binder_name();
      ts_.expect_symbol("->");
      std::string r1 = bind(x1);
      SourceTerm left = parse_term();
      unbind(1);
      ts_.expect_symbol("|");
      ts_.expect_keyword("inr");
      std::string x2 = binder_name();
      ts_.expect_symbol("->");
      std::string r2 = bind(x2);
      SourceTerm right = parse_term();
      unbind(1);
      return make_source(sterm::Case{scrut, r1, left, r2, right});
    }
    if (ts_.accept_keyword("absurd")) {
      return make_source(sterm::Absurd{parse_term(), nullptr});
    }
    return parse_app();
  }

  bool starts_atom() const {
    const Token& t = ts_.peek();
    if (t.kind == TokenKind::Symbol) return t.text == "(";
    if (t.kind != TokenKind::Ident) return false;
    if (t.text == "fst" || t.text == "snd" || t.text == "inl" || t.text == "inr") return true;
    return !is_reserved(t.text);
  }

  SourceTerm parse_app() {
    if (!starts_atom()) ts_.fail("expected a term");
    SourceTerm t = parse_atom();
    while (starts_atom()) t = s_app(t, parse_atom());
    return t;
  }

  std::vector<SourceTerm> parse_args() {
    std::vector<SourceTerm> args;
    ts_.expect_symbol("(");
    args.push_back(parse_term());
    while (ts_.accept_symbol(",")) args.push_back(parse_term());
    ts_.expect_symbol(")");
    return args;
  }

  SourceTerm case_chain(const std::string& x, const std::vector<SourceTerm>& branches, std::size_t n) {
    if (n == 1) return branches[0];
    std::string inner = fresh("c");
    std::string last = fresh("c");
    SourceTerm left = case_chain(inner, branches, n - 1);
    return make_source(sterm::Case{s_var(x), inner, left, last, branches[n - 1]});
  }

  SourceTerm parse_operation(const std::string& name) {
    std::string index;
    if (ts_.accept_symbol("[")) {
      const Token& lit = ts_.peek();
      if (lit.kind != TokenKind::Ident && lit.kind != TokenKind::Number) ts_.fail("expected an operation index");
      index = ts_.next().text;
      ts_.expect_symbol("]");
    }
    const Token at = ts_.peek();
    const OperationDecl* decl = sig_.find_operation(name, index);
    if (!decl) {
      throw SyntaxError("unknown operation '" + operation_key(name, index) + "'", at.line, at.column);
    }
    std::vector<SourceTerm> args = parse_args();
    if (decl->nary) {
      if (static_cast<int>(args.size()) != *decl->nary) {
        throw SyntaxError("operation '" + operation_key(name, index) + "' takes " + std::to_string(*decl->nary) +
                              " argument(s), got " + std::to_string(args.size()),
                          at.line, at.column);
      }
      std::string x = fresh("x");
      SourceTerm lam = s_lam(x, finite_sum_type(*decl->nary), case_chain(x, args, args.size()));
      return make_source(sterm::Op{name, index, nullptr, s_pair(lam, s_unit())});
    }
    if (args.size() != 1) {
      throw SyntaxError("operation '" + operation_key(name, index) +
                            "' is not declared n-ary; apply it to a single (continuation, coarity) pair",
                        at.line, at.column);
    }
    return make_source(sterm::Op{name, index, nullptr, args[0]});
  }

  SourceTerm parse_atom() {
    if (ts_.accept_symbol("(")) {
      if (ts_.accept_symbol(")")) return s_unit();
      SourceTerm first = parse_term();
      if (ts_.accept_symbol(",")) {
        SourceTerm second = parse_term();
        ts_.expect_symbol(")");
        return s_pair(first, second);
      }
      ts_.expect_symbol(")");
      return first;
    }
    if (ts_.accept_keyword("fst")) return make_source(sterm::Proj{1, parse_atom()});
    if (ts_.accept_keyword("snd")) return make_source(sterm::Proj{2, parse_atom()});
    for (int index : {1, 2}) {
      if (ts_.accept_keyword(index == 1 ? "inl" : "inr")) {
        ts_.expect_symbol("[");
        SourceType sum = parse_type();
        ts_.expect_symbol("]");
        return make_source(sterm::Inj{index, sum, parse_atom()});
      }
    }
    const Token tok = ts_.peek();
    std::string name = ts_.expect_ident("a term");
    if (const std::string* local = lookup_local(name)) return s_var(*local);
    if (free_names_.count(name)) return s_var(name);
    if (sig_.has_operation_name(name) && (ts_.is_symbol("(") || ts_.is_symbol("["))) {
      return parse_operation(name);
    }
    if (sig_.find_constant(name)) {
      if (!starts_atom()) ts_.fail("constant '" + name + "' must be applied to an argument");
      return make_source(sterm::Const{name, parse_atom()});
    }
    throw SyntaxError("unknown identifier '" + name + "'", tok.line, tok.column);
  }

  TokenStream ts_;
  const Signature& sig_;
  const std::set<std::string>& free_names_;
  std::set<std::string> taken_;
  std::set<std::string> binders_;
  std::vector<std::pair<std::string, std::string>> scope_;
  int counter_ = 0;
};

}  // namespace

SourceTerm parse_program(std::string_view text, const Signature& sig, const std::set<std::string>& free_names) {
  return ProgramParser(text, sig, free_names).parse_all();
}

SourceType parse_source_type(std::string_view text, const Signature& sig) {
  TokenStream ts(detail::tokenize(text));
  SourceType t = TypeParser(ts, sig).parse();
  if (!ts.at_end()) ts.fail("unexpected trailing input in type");
  return t;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cpswp
