#pragma once

// Values of ground types and the denotations of the shipped effect-free
// constants. Both the formula evaluator and the direct-semantics oracle
// interpret constants through apply_constant.

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

#include "cpswp/source.hpp"

namespace cpswp {

struct GroundValueNode;
using GroundValue = std::shared_ptr<const GroundValueNode>;

namespace gval {
struct Unit {};
struct Nat {
  std::uint64_t value;
};
struct Real {
  double value;
};
struct Pair {
  GroundValue first, second;
};
struct Inj {
  int index;  // 1 or 2
  GroundValue value;
};
}  // namespace gval

struct GroundValueNode {
  std::variant<gval::Unit, gval::Nat, gval::Real, gval::Pair, gval::Inj> node;
};

GroundValue g_unit();
GroundValue g_nat(std::uint64_t n);
GroundValue g_real(double r);
GroundValue g_pair(GroundValue a, GroundValue b);
GroundValue g_inj(int index, GroundValue v);

// Total order; used for map keys and set membership.
int compare(const GroundValue& a, const GroundValue& b);
struct GroundValueLess {
  bool operator()(const GroundValue& a, const GroundValue& b) const { return compare(a, b) < 0; }
};

std::string to_string(const GroundValue& v);

// Denotation of a shipped constant. Throws EvalError for unknown names or
// arguments of the wrong shape.
GroundValue apply_constant(const std::string& name, const GroundValue& arg);
bool has_constant_denotation(const std::string& name);

}  // namespace cpswp
