#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cpswp/source.hpp"

namespace cpswp {

// Shipped signatures: "trace" (event[a], choice), "cost" (flip[p], tick,
// unif) and "all" (both). Each carries the arithmetic constants over nat and
// real, all with product-ground coarities.
Signature builtin_signature(std::string_view instance);

// {base_types:[...], constants:{name:{ar,car}}, operations:{name:{ar,car,nary}}}
// with types written in the program type grammar. An optional "indexed":true
// on an operation declares a family such as flip[p].
Signature parse_signature_json(std::string_view text);
Signature load_signature_file(const std::string& path);
std::string signature_to_json(const Signature& sig);

struct SignatureReport {
  bool ok = true;
  // Constants whose coarity is not built from base types, unit and products.
  std::vector<std::string> offending_constants;
  std::vector<std::string> messages;
};

SignatureReport validate_signature(const Signature& sig);

}  // namespace cpswp
