#include <algorithm>

#include "crosslink/unigraph/graph.hpp"
#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

using namespace crosslink;
using namespace crosslink::unigraph;

namespace {

const char *kApp = R"(
class p.Main {
    void onCreate() {
        invoke virtual this.go()
        return
    }

    native void go()

    void hidden() {
        invoke virtual this.deeper()
        return
    }

    void deeper() {
        return
    }

    void never() {
        return
    }
}

entrypoint Lp/Main;->onCreate()V
)";

const char *kLib = R"(
module "lib" {
    export fn Java_p_Main_go(env:env, self:object) {
        call step(env, self)
        ret
    }

    fn step(env:env, self:object) {
        cls = GetObjectClass(env, self)
        n = const-str "hidden"
        s = const-str "()V"
        m = GetMethodID(env, cls, n, s)
        CallVoidMethod(env, self, m)
        CallVoidMethod(env, self, m)
        ret
    }

    fn orphan(env:env) {
        call step(env, env)
        ret
    }
}
)";

struct Fixture
{
    managed::ManagedProgram p = testing::mir(kApp);
    std::vector<native::NativeModule> mods{testing::nir(kLib)};
    bridge::BindingSet b = bridge::discover_bindings(p, mods, {});
    MergeResult r = merge_and_patch(p, mods, b);
};

} // namespace

TEST_SUITE("unigraph")
{
    TEST_CASE("the managed call graph has one edge per distinct invoke")
    {
        UnifiedGraph g = build_managed_cg(testing::mir(kApp));
        CHECK(g.nodes.size() == 5);
        CHECK(g.count(EdgeKind::managed) == 2);
        CHECK(g.nodes.at("Lp/Main;->go()V").is_native_method);
    }

    TEST_CASE("dangling edges are analysis errors")
    {
        UnifiedGraph g;
        g.add_node({"a", NodeKind::managed, "a", false, false});
        CHECK_THROWS_AS(g.add_edge("a", "b", EdgeKind::managed), AnalysisError);
    }

    TEST_CASE("pruning keeps functions reachable from entry roots")
    {
        native::NativeCallGraph cg = native::build_native_cg(testing::nir(kLib));
        PruneResult pr = prune_native_cg(cg, {"Java_p_Main_go"});
        CHECK(pr.graph.nodes == std::set<std::string>{"Java_p_Main_go", "step"});
        CHECK(pr.removed_nodes == 1);
        CHECK(pr.removed_edges == 1);
    }

    TEST_CASE("merging adds entry and exit edges and finds newly reachable code")
    {
        Fixture f;
        const UnifiedGraph &g = f.r.graph;
        CHECK(g.count(EdgeKind::entry) == 1);
        CHECK(g.count(EdgeKind::exit) == 1); // two call sites, one (function, target) pair
        CHECK(f.b.exits.size() == 2);
        CHECK(g.count(EdgeKind::native) == 1);
        CHECK_FALSE(g.has_node("lib:orphan"));
        CHECK(f.r.reach.newly_reachable ==
              std::vector<std::string>{"Lp/Main;->deeper()V", "Lp/Main;->hidden()V"});
        for (const auto &e : g.edges)
            CHECK_MESSAGE(edge_violation(g, e).empty(), edge_violation(g, e));
    }

    TEST_CASE("reachability agrees with a plain breadth-first search")
    {
        Fixture f;
        const UnifiedGraph &g = f.r.graph;
        std::vector<std::string> roots = f.r.reach.roots;
        auto all = oracle::bfs(g.edges, roots, {EdgeKind::managed, EdgeKind::native, EdgeKind::entry, EdgeKind::exit});
        auto base = oracle::bfs(g.edges, roots, {EdgeKind::managed});
        CHECK(std::set<std::string>(f.r.reach.reachable.begin(), f.r.reach.reachable.end()) == all);
        CHECK(std::set<std::string>(f.r.reach.managed_only.begin(), f.r.reach.managed_only.end()) == base);
    }

    TEST_CASE("edge-kind violations are named")
    {
        Fixture f;
        UnifiedGraph g = f.r.graph;
        CHECK_FALSE(edge_violation(g, {"Lp/Main;->onCreate()V", "lib:step", EdgeKind::entry}).empty());
        CHECK_FALSE(edge_violation(g, {"lib:step", "Lp/Main;->never()V", EdgeKind::managed}).empty());
        CHECK_FALSE(edge_violation(g, {"Lp/Main;->never()V", "lib:step", EdgeKind::exit}).empty());
        CHECK(edge_violation(g, {"lib:step", "Lp/Main;->never()V", EdgeKind::exit}).empty());
    }

    TEST_CASE("the DOT export colors nodes by reachability")
    {
        Fixture f;
        std::string dot = export_dot(f.r.graph, f.r.reach);
        CHECK(dot.rfind("digraph unigraph {\n", 0) == 0);
        CHECK(dot.find("\"Lp/Main;->hidden()V\" [label=\"Main.hidden\", fillcolor=tomato") != std::string::npos);
        CHECK(dot.find("\"Lp/Main;->never()V\" [label=\"Main.never\", fillcolor=lightgray") != std::string::npos);
        CHECK(dot.find("\"Lp/Main;->onCreate()V\" [label=\"Main.onCreate\", fillcolor=palegreen") != std::string::npos);
        CHECK(dot.find("\"lib:step\" [label=\"lib:step\", fillcolor=lightblue") != std::string::npos);
        CHECK(dot.find("[kind=exit") != std::string::npos);
    }

    TEST_CASE("the JSON export carries counts and reach classes")
    {
        Fixture f;
        Json j = export_json(f.r.graph, f.r.reach);
        CHECK(j["schema"] == graph_schema);
        CHECK(j["edge_counts"]["entry"] == 1);
        CHECK(j["edge_counts"]["exit"] == 1);
        CHECK(j["nodes"].size() == f.r.graph.nodes.size());
        auto it = std::find_if(j["nodes"].begin(), j["nodes"].end(),
                               [](const Json &n) { return n["id"] == "Lp/Main;->deeper()V"; });
        REQUIRE(it != j["nodes"].end());
        CHECK((*it)["reach"] == "newly-reachable");
    }

    TEST_CASE("bindings that name missing functions are rejected")
    {
        Fixture f;
        bridge::BindingSet bad = f.b;
        bad.entries[0].native_fn.function = "gone";
        CHECK_THROWS_AS((void)merge_and_patch(f.p, f.mods, bad), AnalysisError);
    }
}
