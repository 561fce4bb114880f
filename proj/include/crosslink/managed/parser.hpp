#pragma once

#include <span>
#include <string>
#include <string_view>

#include "crosslink/managed/program.hpp"

namespace crosslink::managed {

/// Parses one or more managed-IR source files into a single resolved program.
/// Classes from all files share one namespace, so framework declarations may
/// live in a separate file. Throws InputError on the first syntax or
/// resolution error.
[[nodiscard]] ManagedProgram parse_managed(std::span<const SourceFile> files);
[[nodiscard]] ManagedProgram parse_managed(std::string_view text, const std::string &file = "<input>");

/// Canonical text form. parse_managed(print_managed(p)) == p.
[[nodiscard]] std::string print_managed(const ManagedProgram &p);
[[nodiscard]] std::string print_statement(const Statement &s);

} // namespace crosslink::managed
