#pragma once

// The target logic: a simply typed lambda calculus whose arrows all end in
// the answer type R, with modal operators, letrec predicates, connectives,
// quantifiers and weight arithmetic.

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "cpswp/source.hpp"

namespace cpswp {

struct TargetTypeNode;
using TargetType = std::shared_ptr<const TargetTypeNode>;

namespace ttype {
struct Answer {};
struct Base {
  std::string name;
};
struct Unit {};
struct Empty {};
struct Prod {
  TargetType left, right;
};
struct Sum {
  TargetType left, right;
};
// arg -> R
struct Pred {
  TargetType arg;
};
}  // namespace ttype

struct TargetTypeNode {
  std::variant<ttype::Answer, ttype::Base, ttype::Unit, ttype::Empty, ttype::Prod, ttype::Sum, ttype::Pred> node;
};

TargetType t_answer();
TargetType t_base(std::string name);
TargetType t_unit();
TargetType t_empty();
TargetType t_prod(TargetType l, TargetType r);
TargetType t_sum(TargetType l, TargetType r);
TargetType t_pred(TargetType arg);

bool target_type_equal(const TargetType& a, const TargetType& b);
bool is_answer(const TargetType& t);
// Built from base, unit, empty, products and sums.
bool is_ground(const TargetType& t);
// Ground source types embed unchanged; throws TypeError on arrows.
TargetType ground_to_target(const SourceType& t);
SourceType target_to_ground(const TargetType& t);
std::string to_string(const TargetType& t);

struct TargetTermNode;
using TargetTerm = std::shared_ptr<const TargetTermNode>;

// Names recovered from a pair pattern \(x, k). M, which is stored expanded
// as \z. M[fst z/x, snd z/k]. Only the printer looks at it.
using PairHint = std::optional<std::pair<std::string, std::string>>;

enum class BinOp { And, Or, Implies, Add, Mul };

namespace tterm {
struct Var {
  std::string name;
};
struct Const {
  std::string name;
  TargetTerm arg;
};
struct Modal {
  std::string name;
  std::string index;
  TargetTerm arg;
};
struct UnitVal {};
struct Pair {
  TargetTerm first, second;
};
struct Proj {
  int index;
  TargetTerm arg;
};
struct Absurd {
  TargetTerm arg;
};
struct Inj {
  int index;
  TargetType sum;
  TargetTerm arg;
};
struct Case {
  TargetTerm scrutinee;
  std::string left_binder;
  TargetTerm left;
  std::string right_binder;
  TargetTerm right;
};
struct Lam {
  std::string binder;
  TargetType type;  // may be null in parsed formulas
  TargetTerm body;
  PairHint hint;
};
struct App {
  TargetTerm fn, arg;
};
// letrec f (x : arg_type) = body in rest, with f : arg_type -> R.
struct LetRecPred {
  std::string fname;
  std::string binder;
  TargetType arg_type;  // may be null in parsed formulas
  TargetTerm body;
  TargetTerm rest;
  PairHint hint;
};
struct BoolLit {
  bool value;
};
struct Binary {
  BinOp op;
  TargetTerm left, right;
};
struct Quant {
  bool exists;
  std::string binder;
  TargetType type;
  TargetTerm body;
};
// Nonnegative, possibly +inf.
struct WeightLit {
  double value;
};
}  // namespace tterm

struct TargetTermNode {
  std::variant<tterm::Var, tterm::Const, tterm::Modal, tterm::UnitVal, tterm::Pair, tterm::Proj, tterm::Absurd,
               tterm::Inj, tterm::Case, tterm::Lam, tterm::App, tterm::LetRecPred, tterm::BoolLit, tterm::Binary,
               tterm::Quant, tterm::WeightLit>
      node;
};

template <class T>
TargetTerm make_target(T node) {
  return std::make_shared<const TargetTermNode>(TargetTermNode{std::move(node)});
}

TargetTerm t_var(std::string name);
TargetTerm t_unitval();
TargetTerm t_pair(TargetTerm a, TargetTerm b);
TargetTerm t_proj(int index, TargetTerm arg);
TargetTerm t_lam(std::string binder, TargetType type, TargetTerm body, PairHint hint = std::nullopt);
TargetTerm t_app(TargetTerm fn, TargetTerm arg);
TargetTerm t_true();
TargetTerm t_false();
TargetTerm t_bin(BinOp op, TargetTerm l, TargetTerm r);
TargetTerm t_weight(double w);

using TargetContext = std::vector<std::pair<std::string, TargetType>>;

// Typing of the target. Case and Absurd eliminate into R only; modal
// operators take (ar -> R) * car; connectives and quantifiers live at R.
// Weight + and * also accept operands of base type real, read as weights.
TargetType typecheck_target(const Signature& sig, const TargetContext& ctx, const TargetTerm& term);

std::set<std::string> free_vars(const TargetTerm& term);
// Every name occurring in the term, bound or free.
std::set<std::string> all_target_names(const TargetTerm& term);
// Capture-avoiding term[value/var]; bound names clashing with the free
// variables of value are renamed.
TargetTerm substitute(const TargetTerm& term, const std::string& var, const TargetTerm& value);
// Missing type annotations match anything; weights compare up to 1e-12.
bool alpha_equal(const TargetTerm& a, const TargetTerm& b);

// Beta, projection and case-of-injection reduction. A letrec whose scope is a
// lambda moves under it, and one in function position takes the argument
// into its scope. Meaning-preserving; printing only.
TargetTerm normalize(const TargetTerm& term);

// Matches the argument (\x:n. delta(x, x1.M1, ..., xn.Mn), ()) of an n-ary
// modal operator and returns M1..Mn.
bool match_nary_modal(const TargetTerm& arg, int n, std::vector<TargetTerm>& branches);

struct PrintOptions {
  bool types = false;
  const Signature* sig = nullptr;  // for n-ary re-sugaring; null = all builtins
};

std::string pretty_print(const TargetTerm& term, const PrintOptions& opts = {});

// Reads the printed syntax back. Unbound identifiers are free variables.
TargetTerm parse_target(std::string_view text, const Signature& sig);

// Node-tagged tree.
std::string target_to_json(const TargetTerm& term, int indent = -1);

}  // namespace cpswp
