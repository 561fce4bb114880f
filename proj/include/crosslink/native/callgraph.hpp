#pragma once

#include <set>
#include <string>
#include <utility>

#include "crosslink/native/module.hpp"

namespace crosslink::native {

/// Intra-module direct-call graph. Intrinsic calls are bridge events and do
/// not contribute edges.
struct NativeCallGraph
{
    std::string module;
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges;

    [[nodiscard]] std::set<std::string> successors(const std::string &fn) const;
    bool operator==(const NativeCallGraph &) const = default;
};

[[nodiscard]] NativeCallGraph build_native_cg(const NativeModule &m);

} // namespace crosslink::native
