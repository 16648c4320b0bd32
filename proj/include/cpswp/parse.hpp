#pragma once

#include <set>
#include <string>
#include <string_view>

#include "cpswp/source.hpp"

namespace cpswp {

// Parses a program. Repeated binder names are renamed apart and
// n-ary operation applications o(M1, ..., Mn) are desugared to
// o (fun x:n. delta(x, x1.M1, ..., xn.Mn), ()). An identifier that is neither
// bound, a constant, an operation nor listed in `free_names` is an error.
// Free names are kept verbatim.
SourceTerm parse_program(std::string_view text, const Signature& sig,
                         const std::set<std::string>& free_names = {});

SourceType parse_source_type(std::string_view text, const Signature& sig);

std::string read_text_file(const std::string& path);

}  // namespace cpswp
