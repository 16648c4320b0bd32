#include "cpswp/ground.hpp"

#include <functional>
#include <map>
#include <sstream>

#include "cpswp/error.hpp"

namespace cpswp {

namespace {

GroundValue make(decltype(GroundValueNode::node) node) {
  return std::make_shared<const GroundValueNode>(GroundValueNode{std::move(node)});
}

}  // namespace

GroundValue g_unit() {
  static const GroundValue u = make(gval::Unit{});
  return u;
}
GroundValue g_nat(std::uint64_t n) { return make(gval::Nat{n}); }
GroundValue g_real(double r) { return make(gval::Real{r}); }
GroundValue g_pair(GroundValue a, GroundValue b) { return make(gval::Pair{std::move(a), std::move(b)}); }
GroundValue g_inj(int index, GroundValue v) { return make(gval::Inj{index, std::move(v)}); }

int compare(const GroundValue& a, const GroundValue& b) {
  if (a == b) return 0;
  if (a->node.index() != b->node.index()) return a->node.index() < b->node.index() ? -1 : 1;
  if (const auto* n = std::get_if<gval::Nat>(&a->node)) {
    auto m = std::get<gval::Nat>(b->node).value;
    return n->value < m ? -1 : (n->value > m ? 1 : 0);
  }
  if (const auto* r = std::get_if<gval::Real>(&a->node)) {
    auto s = std::get<gval::Real>(b->node).value;
    return r->value < s ? -1 : (r->value > s ? 1 : 0);
  }
  if (const auto* p = std::get_if<gval::Pair>(&a->node)) {
    const auto& q = std::get<gval::Pair>(b->node);
    int c = compare(p->first, q.first);
    return c != 0 ? c : compare(p->second, q.second);
  }
  if (const auto* i = std::get_if<gval::Inj>(&a->node)) {
    const auto& j = std::get<gval::Inj>(b->node);
    if (i->index != j.index) return i->index < j.index ? -1 : 1;
    return compare(i->value, j.value);
  }
  return 0;
}

std::string to_string(const GroundValue& v) {
  std::ostringstream os;
  std::function<void(const GroundValue&)> go = [&](const GroundValue& x) {
    if (std::holds_alternative<gval::Unit>(x->node)) {
      os << "()";
    } else if (const auto* n = std::get_if<gval::Nat>(&x->node)) {
      os << n->value;
    } else if (const auto* r = std::get_if<gval::Real>(&x->node)) {
      os << r->value;
    } else if (const auto* p = std::get_if<gval::Pair>(&x->node)) {
      os << "(";
      go(p->first);
      os << ", ";
      go(p->second);
      os << ")";
    } else if (const auto* i = std::get_if<gval::Inj>(&x->node)) {
      os << (i->index == 1 ? "inl " : "inr ");
      const bool nested = std::holds_alternative<gval::Inj>(i->value->node);
      if (nested) os << "(";
      go(i->value);
      if (nested) os << ")";
    }
  };
  go(v);
  return os.str();
}

namespace {

std::uint64_t as_nat(const GroundValue& v, const std::string& constant) {
  if (const auto* n = std::get_if<gval::Nat>(&v->node)) return n->value;
  throw EvalError("constant '" + constant + "' expects a nat argument, got " + to_string(v));
}

double as_real(const GroundValue& v, const std::string& constant) {
  if (const auto* r = std::get_if<gval::Real>(&v->node)) return r->value;
  throw EvalError("constant '" + constant + "' expects a real argument, got " + to_string(v));
}

const gval::Pair& as_pair(const GroundValue& v, const std::string& constant) {
  if (const auto* p = std::get_if<gval::Pair>(&v->node)) return *p;
  throw EvalError("constant '" + constant + "' expects a pair argument, got " + to_string(v));
}

using Denotation = std::function<GroundValue(const GroundValue&)>;

const std::map<std::string, Denotation>& denotations() {
  static const std::map<std::string, Denotation> table = {
      {"zero", [](const GroundValue&) { return g_nat(0); }},
      {"succ", [](const GroundValue& v) { return g_nat(as_nat(v, "succ") + 1); }},
      {"pred",
       [](const GroundValue& v) {
         auto n = as_nat(v, "pred");
         return g_nat(n == 0 ? 0 : n - 1);
       }},
      {"add",
       [](const GroundValue& v) {
         const auto& p = as_pair(v, "add");
         return g_nat(as_nat(p.first, "add") + as_nat(p.second, "add"));
       }},
      {"mul",
       [](const GroundValue& v) {
         const auto& p = as_pair(v, "mul");
         return g_nat(as_nat(p.first, "mul") * as_nat(p.second, "mul"));
       }},
      {"iszero",
       [](const GroundValue& v) { return as_nat(v, "iszero") == 0 ? g_inj(1, g_unit()) : g_inj(2, g_unit()); }},
      {"rzero", [](const GroundValue&) { return g_real(0.0); }},
      {"rone", [](const GroundValue&) { return g_real(1.0); }},
      {"real_of_nat", [](const GroundValue& v) { return g_real(static_cast<double>(as_nat(v, "real_of_nat"))); }},
      {"radd",
       [](const GroundValue& v) {
         const auto& p = as_pair(v, "radd");
         return g_real(as_real(p.first, "radd") + as_real(p.second, "radd"));
       }},
      {"rmul",
       [](const GroundValue& v) {
         const auto& p = as_pair(v, "rmul");
         return g_real(as_real(p.first, "rmul") * as_real(p.second, "rmul"));
       }},
  };
  return table;
}

}  // namespace

bool has_constant_denotation(const std::string& name) { return denotations().count(name) > 0; }

GroundValue apply_constant(const std::string& name, const GroundValue& arg) {
  auto it = denotations().find(name);
  if (it == denotations().end()) throw EvalError("no denotation for constant '" + name + "'");
  return it->second(arg);
}

}  // namespace cpswp
