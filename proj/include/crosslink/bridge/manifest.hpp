#pragma once

#include "crosslink/bridge/bindings.hpp"
#include "json.hpp"

namespace crosslink {

using Json = nlohmann::ordered_json;

/// Source position as {"file", "line", "column"}; null when unknown.
[[nodiscard]] Json pos_to_json(const SourcePos &pos);
[[nodiscard]] Json diagnostics_to_json(const std::vector<Diagnostic> &diags);

} // namespace crosslink

namespace crosslink::bridge {

inline constexpr const char *bindings_schema = "crosslink.bindings/1";

[[nodiscard]] Json bindings_to_json(const BindingSet &b);

} // namespace crosslink::bridge
