#include "crosslink/unigraph/graph.hpp"

#include <deque>
#include <sstream>

#include "crosslink/support/lexer.hpp"

namespace crosslink::unigraph {

const char *to_string(NodeKind k)
{
    return k == NodeKind::managed ? "managed" : "native";
}

const char *to_string(EdgeKind k)
{
    switch (k)
    {
    case EdgeKind::managed: return "managed";
    case EdgeKind::native: return "native";
    case EdgeKind::entry: return "entry";
    case EdgeKind::exit: return "exit";
    }
    return "?";
}

std::string native_node_id(const std::string &module, const std::string &function)
{
    return module + ":" + function;
}

void UnifiedGraph::add_node(Node n)
{
    std::string id = n.id;
    nodes.emplace(std::move(id), std::move(n));
}

void UnifiedGraph::add_edge(const std::string &from, const std::string &to, EdgeKind kind)
{
    for (const auto *end : {&from, &to})
        if (!has_node(*end))
            throw AnalysisError(std::string(to_string(kind)) + " edge " + from + " -> " + to +
                                " has dangling endpoint " + *end);
    edges.insert({from, to, kind});
}

std::size_t UnifiedGraph::count(EdgeKind kind) const
{
    std::size_t n = 0;
    for (const auto &e : edges)
        n += e.kind == kind;
    return n;
}

std::set<std::string> UnifiedGraph::reachable(const std::vector<std::string> &roots,
                                              const std::set<EdgeKind> &kinds) const
{
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto &e : edges)
        if (kinds.count(e.kind))
            succ[e.from].push_back(e.to);
    std::set<std::string> seen;
    std::deque<std::string> queue;
    for (const auto &r : roots)
        if (has_node(r) && seen.insert(r).second)
            queue.push_back(r);
    while (!queue.empty())
    {
        std::string n = std::move(queue.front());
        queue.pop_front();
        for (const auto &s : succ[n])
            if (seen.insert(s).second)
                queue.push_back(s);
    }
    return seen;
}

UnifiedGraph build_managed_cg(const managed::ManagedProgram &p)
{
    UnifiedGraph g;
    p.for_each_method([&](const managed::ManagedClass &, const managed::ManagedMethod &m) {
        g.add_node({m.id.canonical(), NodeKind::managed, m.id.short_name(), m.is_native, m.is_extern});
    });
    p.for_each_method([&](const managed::ManagedClass &, const managed::ManagedMethod &m) {
        for (const auto &s : m.body)
            if (s.kind == managed::StmtKind::invoke)
                g.add_edge(m.id.canonical(), s.callee.canonical(), EdgeKind::managed);
    });
    return g;
}

PruneResult prune_native_cg(const native::NativeCallGraph &g, const std::set<std::string> &roots)
{
    PruneResult out;
    out.graph.module = g.module;
    std::deque<std::string> queue;
    for (const auto &r : roots)
        if (g.nodes.count(r) && out.graph.nodes.insert(r).second)
            queue.push_back(r);
    while (!queue.empty())
    {
        std::string n = std::move(queue.front());
        queue.pop_front();
        for (const auto &s : g.successors(n))
            if (out.graph.nodes.insert(s).second)
                queue.push_back(s);
    }
    for (const auto &e : g.edges)
        if (out.graph.nodes.count(e.first))
            out.graph.edges.insert(e);
    out.removed_nodes = g.nodes.size() - out.graph.nodes.size();
    out.removed_edges = g.edges.size() - out.graph.edges.size();
    return out;
}

MergeResult merge_and_patch(const managed::ManagedProgram &p, std::span<const native::NativeModule> modules,
                            const bridge::BindingSet &bindings)
{
    MergeResult out;
    out.graph = build_managed_cg(p);
    UnifiedGraph &g = out.graph;

    for (const auto &mod : modules)
    {
        std::set<std::string> roots;
        for (const auto &e : bindings.entries)
            if (e.native_fn.module == mod.name)
                roots.insert(e.native_fn.function);
        PruneResult pruned = prune_native_cg(native::build_native_cg(mod), roots);
        out.pruning.push_back({mod.name, pruned.graph.nodes.size(), pruned.removed_nodes, pruned.removed_edges});
        for (const auto &fn : pruned.graph.nodes)
            g.add_node({native_node_id(mod.name, fn), NodeKind::native, native_node_id(mod.name, fn), false, false});
        for (const auto &[from, to] : pruned.graph.edges)
            g.add_edge(native_node_id(mod.name, from), native_node_id(mod.name, to), EdgeKind::native);
    }

    for (const auto &e : bindings.entries)
        g.add_edge(e.method.canonical(), e.native_fn.node_id(), EdgeKind::entry);
    for (const auto &x : bindings.exits)
        g.add_edge(x.in_function.node_id(), x.target.canonical(), EdgeKind::exit);

    ReachabilityReport &r = out.reach;
    for (const auto &ep : p.entry_points)
        r.roots.push_back(ep.canonical());
    std::set<std::string> base = g.reachable(r.roots, {EdgeKind::managed});
    std::set<std::string> full =
        g.reachable(r.roots, {EdgeKind::managed, EdgeKind::native, EdgeKind::entry, EdgeKind::exit});
    r.managed_only.assign(base.begin(), base.end());
    r.reachable.assign(full.begin(), full.end());
    for (const auto &n : full)
        if (!base.count(n) && g.nodes.at(n).kind == NodeKind::managed)
            r.newly_reachable.push_back(n);
    return out;
}

std::string edge_violation(const UnifiedGraph &g, const Edge &e)
{
    auto from = g.nodes.find(e.from);
    auto to = g.nodes.find(e.to);
    if (from == g.nodes.end() || to == g.nodes.end())
        return "dangling endpoint";
    const Node &a = from->second;
    const Node &b = to->second;
    auto module_of = [](const std::string &id) { return id.substr(0, id.find(':')); };
    switch (e.kind)
    {
    case EdgeKind::managed:
        if (a.kind != NodeKind::managed || b.kind != NodeKind::managed)
            return "managed edge must join two managed nodes";
        break;
    case EdgeKind::native:
        if (a.kind != NodeKind::native || b.kind != NodeKind::native)
            return "native edge must join two native nodes";
        if (module_of(a.id) != module_of(b.id))
            return "native edge crosses modules";
        break;
    case EdgeKind::entry:
        if (a.kind != NodeKind::managed || !a.is_native_method || b.kind != NodeKind::native)
            return "entry edge must go from a native-flagged method to a native node";
        break;
    case EdgeKind::exit:
        if (a.kind != NodeKind::native || b.kind != NodeKind::managed)
            return "exit edge must go from a native node to a managed node";
        break;
    }
    return {};
}

namespace {

enum class Shade { managed_reachable, newly_reachable, native, unreachable };

Shade shade_of(const Node &n, const std::set<std::string> &base, const std::set<std::string> &fresh)
{
    if (n.kind == NodeKind::native)
        return Shade::native;
    if (fresh.count(n.id))
        return Shade::newly_reachable;
    if (base.count(n.id))
        return Shade::managed_reachable;
    return Shade::unreachable;
}

const char *shade_name(Shade s)
{
    switch (s)
    {
    case Shade::managed_reachable: return "managed-reachable";
    case Shade::newly_reachable: return "newly-reachable";
    case Shade::native: return "native";
    case Shade::unreachable: return "unreachable";
    }
    return "?";
}

const char *shade_color(Shade s)
{
    switch (s)
    {
    case Shade::managed_reachable: return "palegreen";
    case Shade::newly_reachable: return "tomato";
    case Shade::native: return "lightblue";
    case Shade::unreachable: return "lightgray";
    }
    return "white";
}

const char *edge_style(EdgeKind k)
{
    switch (k)
    {
    case EdgeKind::managed: return "color=black";
    case EdgeKind::native: return "color=blue";
    case EdgeKind::entry: return "color=darkgreen, style=bold";
    case EdgeKind::exit: return "color=red, style=dashed";
    }
    return "";
}

} // namespace

std::string export_dot(const UnifiedGraph &g, const ReachabilityReport &r)
{
    std::set<std::string> base(r.managed_only.begin(), r.managed_only.end());
    std::set<std::string> fresh(r.newly_reachable.begin(), r.newly_reachable.end());
    std::ostringstream os;
    os << "digraph unigraph {\n";
    os << "    node [shape=box, style=filled, fontname=\"monospace\"];\n";
    for (const auto &[id, n] : g.nodes)
    {
        Shade s = shade_of(n, base, fresh);
        os << "    " << quote_string(id) << " [label=" << quote_string(n.label) << ", fillcolor=" << shade_color(s)
           << ", class=" << quote_string(shade_name(s)) << "];\n";
    }
    for (const auto &e : g.edges)
        os << "    " << quote_string(e.from) << " -> " << quote_string(e.to) << " [kind=" << to_string(e.kind)
           << ", " << edge_style(e.kind) << "];\n";
    os << "}\n";
    return os.str();
}

Json export_json(const UnifiedGraph &g, const ReachabilityReport &r)
{
    std::set<std::string> base(r.managed_only.begin(), r.managed_only.end());
    std::set<std::string> fresh(r.newly_reachable.begin(), r.newly_reachable.end());
    Json nodes = Json::array();
    for (const auto &[id, n] : g.nodes)
        nodes.push_back({{"id", id},
                         {"kind", to_string(n.kind)},
                         {"label", n.label},
                         {"native_method", n.is_native_method},
                         {"extern", n.is_extern},
                         {"reach", shade_name(shade_of(n, base, fresh))}});
    Json edges = Json::array();
    for (const auto &e : g.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}});
    Json counts = Json::object();
    for (EdgeKind k : {EdgeKind::managed, EdgeKind::native, EdgeKind::entry, EdgeKind::exit})
        counts[to_string(k)] = g.count(k);
    return Json{{"schema", graph_schema}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)},
                {"edge_counts", std::move(counts)}};
}

Json reachability_to_json(const ReachabilityReport &r, const std::vector<PruneStats> &pruning)
{
    Json prune = Json::array();
    for (const auto &s : pruning)
        prune.push_back({{"module", s.module},
                         {"kept_nodes", s.kept_nodes},
                         {"removed_nodes", s.removed_nodes},
                         {"removed_edges", s.removed_edges}});
    return Json{{"schema", "crosslink.reachability/1"},
                {"roots", r.roots},
                {"managed_only", r.managed_only},
                {"reachable", r.reachable},
                {"newly_reachable", r.newly_reachable},
                {"native_pruning", std::move(prune)}};
}

} // namespace crosslink::unigraph
