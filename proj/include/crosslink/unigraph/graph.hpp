#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "crosslink/bridge/bindings.hpp"
#include "crosslink/bridge/manifest.hpp"
#include "crosslink/managed/program.hpp"
#include "crosslink/native/callgraph.hpp"

namespace crosslink::unigraph {

enum class NodeKind { managed, native };
enum class EdgeKind { managed, native, entry, exit };

[[nodiscard]] const char *to_string(NodeKind k);
[[nodiscard]] const char *to_string(EdgeKind k);

/// Managed nodes are keyed by canonical method id, native nodes by
/// `module:function`.
struct Node
{
    std::string id;
    NodeKind kind = NodeKind::managed;
    std::string label;
    bool is_native_method = false; // managed method flagged native
    bool is_extern = false;
};

struct Edge
{
    std::string from;
    std::string to;
    EdgeKind kind = EdgeKind::managed;
    auto operator<=>(const Edge &) const = default;
};

struct UnifiedGraph
{
    std::map<std::string, Node> nodes;
    std::set<Edge> edges;

    void add_node(Node n);
    /// Throws AnalysisError if either endpoint is missing.
    void add_edge(const std::string &from, const std::string &to, EdgeKind kind);
    [[nodiscard]] bool has_node(const std::string &id) const { return nodes.count(id) > 0; }
    [[nodiscard]] std::size_t count(EdgeKind kind) const;
    /// Nodes reachable from `roots` following edges whose kind is in `kinds`.
    [[nodiscard]] std::set<std::string> reachable(const std::vector<std::string> &roots,
                                                  const std::set<EdgeKind> &kinds) const;
};

[[nodiscard]] std::string native_node_id(const std::string &module, const std::string &function);

/// One node per managed method (bodied, native and extern), one managed edge
/// per distinct resolved invoke.
[[nodiscard]] UnifiedGraph build_managed_cg(const managed::ManagedProgram &p);

struct PruneResult
{
    native::NativeCallGraph graph;
    std::size_t removed_nodes = 0;
    std::size_t removed_edges = 0;
};

/// Restricts a native call graph to functions reachable from `roots`.
[[nodiscard]] PruneResult prune_native_cg(const native::NativeCallGraph &g, const std::set<std::string> &roots);

struct ReachabilityReport
{
    std::vector<std::string> roots;
    std::vector<std::string> managed_only;     // reachable using managed edges alone
    std::vector<std::string> reachable;        // reachable over the unified graph
    std::vector<std::string> newly_reachable;  // managed methods reachable only through native code
};

struct PruneStats
{
    std::string module;
    std::size_t kept_nodes = 0;
    std::size_t removed_nodes = 0;
    std::size_t removed_edges = 0;
};

struct MergeResult
{
    UnifiedGraph graph;
    ReachabilityReport reach;
    std::vector<PruneStats> pruning;
};

/// Builds the unified graph: managed call graph, pruned native call graphs,
/// one entry edge per binding and one exit edge per distinct
/// (function, target) exit. Throws AnalysisError on dangling endpoints.
[[nodiscard]] MergeResult merge_and_patch(const managed::ManagedProgram &p,
                                          std::span<const native::NativeModule> modules,
                                          const bridge::BindingSet &bindings);

/// Reports which edge-kind rules (`managed` joins two managed nodes, `native`
/// two native nodes of one module, `entry` native-flagged method -> native,
/// `exit` native -> managed) an edge breaks; empty when it is well formed.
[[nodiscard]] std::string edge_violation(const UnifiedGraph &g, const Edge &e);

[[nodiscard]] std::string export_dot(const UnifiedGraph &g, const ReachabilityReport &r);
[[nodiscard]] Json export_json(const UnifiedGraph &g, const ReachabilityReport &r);
[[nodiscard]] Json reachability_to_json(const ReachabilityReport &r, const std::vector<PruneStats> &pruning);

inline constexpr const char *graph_schema = "crosslink.graph/1";

} // namespace crosslink::unigraph
