#include "cpswp/signature.hpp"

#include "json.hpp"

#include "cpswp/error.hpp"
#include "cpswp/parse.hpp"

namespace cpswp {

namespace {

using nlohmann::json;

void add_arithmetic(Signature& sig) {
  sig.base_types.insert({"nat", "real"});
  auto nat = base_type("nat");
  auto real = base_type("real");
  sig.constants["zero"] = {unit_type(), nat};
  sig.constants["succ"] = {nat, nat};
  sig.constants["pred"] = {nat, nat};
  sig.constants["add"] = {prod_type(nat, nat), nat};
  sig.constants["mul"] = {prod_type(nat, nat), nat};
  sig.constants["rzero"] = {unit_type(), real};
  sig.constants["rone"] = {unit_type(), real};
  sig.constants["real_of_nat"] = {nat, real};
  sig.constants["radd"] = {prod_type(real, real), real};
  sig.constants["rmul"] = {prod_type(real, real), real};
}

OperationDecl nary_op(int n, bool indexed) {
  return OperationDecl{finite_sum_type(n), unit_type(), n, indexed};
}

}  // namespace

Signature builtin_signature(std::string_view instance) {
  Signature sig;
  add_arithmetic(sig);
  const bool trace = instance == "trace" || instance == "all";
  const bool cost = instance == "cost" || instance == "all";
  if (!trace && !cost) throw SignatureError("unknown builtin signature '" + std::string(instance) + "'");
  if (trace) {
    sig.operations["event"] = nary_op(1, true);
    sig.operations["choice"] = nary_op(2, false);
  }
  if (cost) {
    sig.operations["flip"] = nary_op(2, true);
    sig.operations["tick"] = nary_op(1, false);
    sig.operations["unif"] = OperationDecl{base_type("real"), unit_type(), std::nullopt, false};
  }
  return sig;
}

Signature parse_signature_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SignatureError(std::string("signature is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SignatureError("signature must be a JSON object");
  for (const auto& [key, unused] : j.items()) {
    if (key != "base_types" && key != "constants" && key != "operations") {
      throw SignatureError("unknown signature field '" + key + "'");
    }
  }
  Signature sig;
  auto type_of = [&](const json& entry, const char* field, const std::string& owner) {
    if (!entry.contains(field) || !entry[field].is_string()) {
      throw SignatureError("'" + owner + "' needs a string field '" + field + "'");
    }
    try {
      return parse_source_type(entry[field].get<std::string>(), sig);
    } catch (const SyntaxError& e) {
      throw SignatureError("bad type in '" + owner + "." + field + "': " + e.what());
    }
  };
  try {
    const json bases = j.value("base_types", json::array());
    const json constants = j.value("constants", json::object());
    const json operations = j.value("operations", json::object());
    for (const auto& b : bases) sig.base_types.insert(b.get<std::string>());
    for (const auto& [name, entry] : constants.items()) {
      sig.constants[name] = ConstantDecl{type_of(entry, "ar", name), type_of(entry, "car", name)};
    }
    for (const auto& [name, entry] : operations.items()) {
      OperationDecl op{type_of(entry, "ar", name), type_of(entry, "car", name), std::nullopt,
                       entry.value("indexed", false)};
      if (entry.contains("nary") && !entry["nary"].is_null()) {
        int n = entry["nary"].get<int>();
        if (n < 0) throw SignatureError("'" + name + "' has a negative nary");
        if (!type_equal(op.arity, finite_sum_type(n)) || !type_equal(op.coarity, unit_type())) {
          throw SignatureError("'" + name + "' is declared nary " + std::to_string(n) + " but its type is " +
                               to_string(op.arity) + " ~> " + to_string(op.coarity));
        }
        op.nary = n;
      }
      sig.operations[name] = op;
    }
  } catch (const json::exception& e) {
    throw SignatureError(std::string("malformed signature: ") + e.what());
  }
  return sig;
}

Signature load_signature_file(const std::string& path) { return parse_signature_json(read_text_file(path)); }

std::string signature_to_json(const Signature& sig) {
  json j;
  j["base_types"] = std::vector<std::string>(sig.base_types.begin(), sig.base_types.end());
  j["constants"] = json::object();
  for (const auto& [name, c] : sig.constants) {
    j["constants"][name] = {{"ar", to_string(c.arity)}, {"car", to_string(c.coarity)}};
  }
  j["operations"] = json::object();
  for (const auto& [name, o] : sig.operations) {
    json e = {{"ar", to_string(o.arity)}, {"car", to_string(o.coarity)}};
    if (o.nary) e["nary"] = *o.nary;
    if (o.indexed) e["indexed"] = true;
    j["operations"][name] = e;
  }
  return j.dump(2);
}

SignatureReport validate_signature(const Signature& sig) {
  SignatureReport r;
  for (const auto& [name, c] : sig.constants) {
    if (!is_ground(c.arity)) {
      r.ok = false;
      r.messages.push_back("constant '" + name + "' has higher-order arity " + to_string(c.arity));
    }
    if (!is_product_ground(c.coarity)) {
      r.ok = false;
      r.offending_constants.push_back(name);
      r.messages.push_back("constant '" + name + "' has coarity " + to_string(c.coarity) +
                           " containing empty, + or ->");
    }
  }
  for (const auto& [name, o] : sig.operations) {
    if (!is_ground(o.arity) || !is_ground(o.coarity)) {
      r.ok = false;
      r.messages.push_back("operation '" + name + "' must have ground arity and coarity");
    }
  }
  return r;
}

}  // namespace cpswp
