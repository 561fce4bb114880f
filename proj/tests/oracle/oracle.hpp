#pragma once

// Reference implementations used to cross-check the analyses. Each one is
// deliberately naive: exhaustive enumeration instead of search, plain
// breadth-first traversal instead of the library's reachability.

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "crosslink/bridge/symvalue.hpp"
#include "crosslink/managed/program.hpp"
#include "crosslink/native/module.hpp"
#include "crosslink/unigraph/graph.hpp"

namespace oracle {

/// One callback reached on some path, with whatever the method id folded to.
struct ExitCall
{
    std::string function;
    std::size_t index = 0;
    std::optional<std::string> cls, name, sig;
    bool is_static = false;

    auto operator<=>(const ExitCall &) const = default;
};

struct PathEnumeration
{
    std::set<ExitCall> calls;
    std::size_t paths = 0; // distinct decision sequences
};

/// True when no function reachable from `fn` jumps backwards or recurses.
bool loop_free(const crosslink::native::NativeModule &m, const std::string &fn);

/// Replays `fn` once per decision vector in [0, 2^k), where k bounds the
/// number of undecidable branches on any path. Requires loop_free().
PathEnumeration enumerate_paths(const crosslink::native::NativeModule &m, const std::string &fn,
                                const std::vector<crosslink::bridge::SymValue> &args);

/// Every tuple of the Cartesian product, first position most significant,
/// produced by decoding the tuple's ordinal in mixed radix.
std::vector<std::vector<std::string>> all_tuples(const std::vector<std::vector<std::string>> &candidates);

/// Walks every control-flow path of `m`. Returns the first problem found
/// (a path falling off the end, a return of the wrong type), or "".
std::string check_returns(const crosslink::managed::ManagedMethod &m);

/// Nodes reachable from `roots` over edges of the given kinds.
std::set<std::string> bfs(const std::set<crosslink::unigraph::Edge> &edges, const std::vector<std::string> &roots,
                          const std::set<crosslink::unigraph::EdgeKind> &kinds);

} // namespace oracle
