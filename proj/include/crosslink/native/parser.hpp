#pragma once

#include <string>
#include <string_view>

#include "crosslink/native/module.hpp"

namespace crosslink::native {

/// Parses one native-IR file (exactly one `module` block, or none for an empty
/// file). Throws InputError on syntax errors, unresolved call targets and
/// malformed table rows.
[[nodiscard]] NativeModule parse_native(std::string_view text, const std::string &file = "<input>");

[[nodiscard]] std::string print_native(const NativeModule &m);
[[nodiscard]] std::string print_instr(const NativeInstr &i);

} // namespace crosslink::native
