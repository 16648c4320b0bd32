#pragma once

// Abstract syntax of the source calculus: a call-by-value lambda calculus
// with effect-free constants, algebraic operations and letrec.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cpswp {

struct SourceTypeNode;
using SourceType = std::shared_ptr<const SourceTypeNode>;

namespace stype {
struct Base {
  std::string name;
};
struct Unit {};
struct Empty {};
struct Prod {
  SourceType left, right;
};
struct Sum {
  SourceType left, right;
};
struct Arrow {
  SourceType from, to;
};
}  // namespace stype

struct SourceTypeNode {
  std::variant<stype::Base, stype::Unit, stype::Empty, stype::Prod, stype::Sum,
               stype::Arrow>
      node;
};

SourceType base_type(std::string name);
SourceType unit_type();
SourceType empty_type();
SourceType prod_type(SourceType left, SourceType right);
SourceType sum_type(SourceType left, SourceType right);
SourceType arrow_type(SourceType from, SourceType to);

// The finite coproduct 0, 1, 1+1, (1+1)+1, ... used by n-ary operations.
SourceType finite_sum_type(int n);
// Inverse of finite_sum_type; nullopt when t is not of that shape.
std::optional<int> finite_sum_size(const SourceType& t);

bool type_equal(const SourceType& a, const SourceType& b);
// No arrow anywhere.
bool is_ground(const SourceType& t);
// Built from base types, unit and products only.
bool is_product_ground(const SourceType& t);
std::string to_string(const SourceType& t);

struct SourceTermNode;
using SourceTerm = std::shared_ptr<const SourceTermNode>;

namespace sterm {
struct Var {
  std::string name;
};
struct Const {
  std::string name;
  SourceTerm arg;
};
// o_rho M. `result` is rho; it is null until the term is elaborated.
struct Op {
  std::string name;
  std::string index;  // "a" in event[a], "0.5" in flip[0.5]; empty if none
  SourceType result;
  SourceTerm arg;
};
struct UnitVal {};
struct Pair {
  SourceTerm first, second;
};
struct Proj {
  int index;  // 1 or 2
  SourceTerm arg;
};
struct Absurd {
  SourceTerm arg;
  SourceType result;  // filled by elaboration
};
// `sum` is the full coproduct type the injection lands in.
struct Inj {
  int index;  // 1 or 2
  SourceType sum;
  SourceTerm arg;
};
struct Case {
  SourceTerm scrutinee;
  std::string left_binder;
  SourceTerm left;
  std::string right_binder;
  SourceTerm right;
};
struct Lam {
  std::string binder;
  SourceType type;
  SourceTerm body;
};
struct App {
  SourceTerm fn, arg;
};
// letrec f (x : arg_type) : result_type = body in rest. Types are null until
// elaboration.
struct LetRec {
  std::string fname;
  std::string binder;
  SourceType arg_type;
  SourceType result_type;
  SourceTerm body;
  SourceTerm rest;
};
}  // namespace sterm

struct SourceTermNode {
  std::variant<sterm::Var, sterm::Const, sterm::Op, sterm::UnitVal, sterm::Pair,
               sterm::Proj, sterm::Absurd, sterm::Inj, sterm::Case, sterm::Lam,
               sterm::App, sterm::LetRec>
      node;
};

template <class T>
SourceTerm make_source(T node) {
  return std::make_shared<const SourceTermNode>(SourceTermNode{std::move(node)});
}

SourceTerm s_var(std::string name);
SourceTerm s_unit();
SourceTerm s_pair(SourceTerm a, SourceTerm b);
SourceTerm s_lam(std::string binder, SourceType type, SourceTerm body);
SourceTerm s_app(SourceTerm fn, SourceTerm arg);

// "name[index]" or just "name".
std::string operation_key(const std::string& name, const std::string& index);

struct ConstantDecl {
  SourceType arity;
  SourceType coarity;
};

struct OperationDecl {
  SourceType arity;
  SourceType coarity;
  // Set when the operation is declared with the finite-coproduct shorthand:
  // arity is the n-fold coproduct of 1 and coarity is 1.
  std::optional<int> nary;
  // Indexed families (event[a], flip[p]) accept any literal index.
  bool indexed = false;
};

struct Signature {
  std::set<std::string> base_types;
  std::map<std::string, ConstantDecl> constants;
  std::map<std::string, OperationDecl> operations;

  const ConstantDecl* find_constant(const std::string& name) const;
  // Looks up "name[index]" first, then an indexed family called `name`.
  const OperationDecl* find_operation(const std::string& name,
                                      const std::string& index) const;
  bool has_operation_name(const std::string& name) const;
};

class TypingContext {
 public:
  TypingContext() = default;

  const SourceType* lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return lookup(name) != nullptr; }
  // Throws TypeError when the name is already bound.
  TypingContext extended(const std::string& name, SourceType type) const;
  const std::vector<std::pair<std::string, SourceType>>& entries() const {
    return entries_;
  }

 private:
  std::vector<std::pair<std::string, SourceType>> entries_;
};

std::set<std::string> free_vars(const SourceTerm& term);
// Every name occurring in the term, bound or free.
std::set<std::string> all_names(const SourceTerm& term);

// Matches the desugared argument (fun x:n. delta(x, x1.M1, ..., xn.Mn), ())
// of an n-ary operation and returns M1..Mn.
bool match_nary_sugar(const SourceTerm& arg, std::vector<SourceTerm>& branches);

// Concrete syntax; n-ary operation applications are re-sugared when the
// desugared shape is recognised.
std::string print_source(const SourceTerm& term);

// Alpha-equivalence. Missing (null) type annotations match anything.
bool source_alpha_equal(const SourceTerm& a, const SourceTerm& b);

}  // namespace cpswp
