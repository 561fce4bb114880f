#include <algorithm>

#include "crosslink/bridge/executor.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crosslink;
using namespace crosslink::bridge;

namespace {

Exploration run(const std::string &body, std::vector<SymValue> args = {}, ExecBudget budget = {},
                const std::string &extra = "")
{
    native::NativeModule m =
        testing::nir("module \"m\" {\n" + extra + "fn f(env:env, self:object, x:int) {\n" + body + "}\n}\n");
    if (args.empty())
        args = {SymValue::unknown(), SymValue::object_handle(std::string("p/Main")), SymValue::unknown()};
    return SymbolicExecutor(m, budget).explore("f", args);
}

std::vector<std::string> names(const Exploration &e)
{
    std::vector<std::string> out;
    for (const auto &c : e.calls)
        out.push_back(c.method.method_name.value_or("?"));
    std::sort(out.begin(), out.end());
    return out;
}

const char *kCall = "    cls = GetObjectClass(env, self)\n"
                    "    mid = GetMethodID(env, cls, n, s)\n"
                    "    CallVoidMethod(env, self, mid)\n";

} // namespace

TEST_SUITE("executor")
{
    TEST_CASE("constants fold into a concrete method handle")
    {
        Exploration e = run(std::string("    n = const-str \"go\"\n    s = const-str \"()V\"\n") + kCall + "    ret\n");
        REQUIRE(e.calls.size() == 1);
        const SymValue &h = e.calls[0].method;
        CHECK(h.is_concrete_method());
        CHECK(*h.class_name == "p/Main");
        CHECK(*h.method_name == "go");
        CHECK(*h.signature == "()V");
        CHECK_FALSE(h.is_static);
        CHECK(e.calls[0].site.index == 4);
        CHECK(e.calls[0].call_stack == std::vector<std::string>{"f"});
        CHECK(e.completed_paths == 1);
        CHECK(e.budget_events.empty());
    }

    TEST_CASE("an undecidable branch explores both sides")
    {
        Exploration e = run(std::string("    s = const-str \"()V\"\n    n = const-str \"a\"\n"
                                        "    branch-if x == 0, Lb\n    n = const-str \"c\"\nLb:\n") +
                            kCall + "    ret\n");
        CHECK(names(e) == std::vector<std::string>{"a", "c"});
        CHECK(e.completed_paths == 2);
    }

    TEST_CASE("a decidable branch follows one side")
    {
        Exploration e = run(std::string("    s = const-str \"()V\"\n    n = const-str \"a\"\n    k = const-int 3\n"
                                        "    branch-if k < 2, Lb\n    n = const-str \"c\"\nLb:\n") +
                            kCall + "    ret\n");
        CHECK(names(e) == std::vector<std::string>{"c"});
        CHECK(e.completed_paths == 1);
    }

    TEST_CASE("string comparisons fold")
    {
        Exploration e = run(std::string("    s = const-str \"()V\"\n    n = const-str \"a\"\n"
                                        "    branch-if n == \"a\", Lb\n    n = const-str \"c\"\nLb:\n") +
                            kCall + "    ret\n");
        CHECK(names(e) == std::vector<std::string>{"a"});
    }

    TEST_CASE("loop-carried values are havocked after the first iteration")
    {
        Exploration e = run(std::string("    s = const-str \"()V\"\n    n = const-str \"\"\n    i = const-int 0\n"
                                        "Ltop:\n    n = concat n, \"z\"\n    i = add i, 1\n    branch-if i < 3, Ltop\n") +
                            kCall + "    ret\n");
        // One iteration leaves i = 1 and then the havocked counter forks.
        std::vector<std::string> got = names(e);
        CHECK(std::count(got.begin(), got.end(), "?") == 1);
        CHECK(std::find(got.begin(), got.end(), "zzz") == got.end());
    }

    TEST_CASE("a path that exceeds the unroll bound ends")
    {
        ExecBudget b;
        b.loop_unroll = 0;
        Exploration e = run("Ltop:\n    goto Ltop\n", {}, b);
        CHECK(e.completed_paths == 0);
        CHECK(e.budget_events.empty());
    }

    TEST_CASE("the path budget caps forking and is reported once per site")
    {
        std::string body;
        for (int i = 0; i < 6; ++i)
            body += "    branch-if x == " + std::to_string(i) + ", L" + std::to_string(i) + "\nL" + std::to_string(i) +
                    ":\n";
        body += "    ret\n";
        ExecBudget b;
        b.max_paths = 4;
        Exploration e = run(body, {}, b);
        CHECK(e.completed_paths == 4);
        REQUIRE_FALSE(e.budget_events.empty());
        for (const auto &ev : e.budget_events)
        {
            CHECK(ev.reason == UnresolvedReason::path_budget_exhausted);
            CHECK(ev.detail == "path limit 4");
        }
    }

    TEST_CASE("the instruction budget ends a path")
    {
        ExecBudget b;
        b.max_instructions = 3;
        Exploration e = run("    a = const-int 1\n    b = const-int 2\n    c = const-int 3\n    d = const-int 4\n    ret\n",
                            {}, b);
        CHECK(e.completed_paths == 0);
        REQUIRE(e.budget_events.size() == 1);
        CHECK(e.budget_events[0].detail == "instruction limit 3");
        CHECK(e.budget_events[0].site.index == 3);
    }

    TEST_CASE("calls beyond the depth budget are skipped with an unknown result")
    {
        ExecBudget b;
        b.max_depth = 3;
        Exploration e = run("    r = call f(env, self, x)\n    ret r\n", {}, b);
        CHECK(e.completed_paths == 1);
        REQUIRE(e.budget_events.size() == 1);
        CHECK(e.budget_events[0].reason == UnresolvedReason::depth_budget_exhausted);
    }

    TEST_CASE("return values flow back from callees")
    {
        Exploration e = run(std::string("    s = const-str \"()V\"\n    n = call pick(env)\n") + kCall + "    ret\n", {},
                            {}, "fn pick(env:env) {\n    v = const-str \"picked\"\n    ret v\n}\n");
        CHECK(names(e) == std::vector<std::string>{"picked"});
        CHECK(e.calls[0].call_stack == std::vector<std::string>{"f"});
    }

    TEST_CASE("callbacks inside callees record the full call stack")
    {
        Exploration e = run("    call g(env, self)\n    ret\n", {}, {},
                            std::string("fn g(env:env, self:object) {\n    s = const-str \"()V\"\n    n = const-str "
                                        "\"deep\"\n") +
                                kCall + "    ret\n}\n");
        REQUIRE(e.calls.size() == 1);
        CHECK(e.calls[0].site.function == "g");
        CHECK(e.calls[0].call_stack == std::vector<std::string>{"f", "g"});
    }

    TEST_CASE("table writes are visible to later reads")
    {
        Exploration e = run(std::string("    v = const-str \"stored\"\n    store-table-entry &t, 0, 0, v\n"
                                        "    n = load-table-entry &t, 0, 0\n    s = load-table-entry &t, 0, 1\n") +
                                kCall + "    ret\n",
                            {}, {}, "table t {\n    (?, \"()V\")\n}\n");
        CHECK(names(e) == std::vector<std::string>{"stored"});
        CHECK(*e.calls[0].method.signature == "()V");
    }

    TEST_CASE("a write at an unknown index makes the whole table unknown")
    {
        Exploration e = run(std::string("    v = const-str \"w\"\n    store-table-entry &t, x, 0, v\n"
                                        "    n = load-table-entry &t, 0, 0\n    s = const-str \"()V\"\n") +
                                kCall + "    ret\n",
                            {}, {}, "table t {\n    (\"orig\")\n}\n");
        CHECK(names(e) == std::vector<std::string>{"?"});
    }

    TEST_CASE("object results carry their declared class")
    {
        Exploration e = run("    n = const-str \"make\"\n    s = const-str \"()Lp/Other;\"\n"
                            "    cls = GetObjectClass(env, self)\n    mid = GetMethodID(env, cls, n, s)\n"
                            "    o = CallObjectMethod(env, self, mid)\n    oc = GetObjectClass(env, o)\n"
                            "    n2 = const-str \"use\"\n    s2 = const-str \"()V\"\n"
                            "    mid2 = GetMethodID(env, oc, n2, s2)\n    CallVoidMethod(env, o, mid2)\n    ret\n");
        REQUIRE(e.calls.size() == 2);
        CHECK(*e.calls[1].method.class_name == "p/Other");
    }

    TEST_CASE("registrations read rows and report the class")
    {
        Exploration e = run("    c = const-str \"p/Main\"\n    k = FindClass(env, c)\n"
                            "    RegisterNatives(env, k, &reg, 1)\n    ret\n",
                            {}, {}, "table reg {\n    (\"nat\", \"()V\", impl)\n}\nfn impl(env:env) {\n    ret\n}\n");
        REQUIRE(e.registrations.size() == 1);
        CHECK(*e.registrations[0].clazz.class_name == "p/Main");
        REQUIRE(e.registrations[0].rows.size() == 1);
        CHECK(e.registrations[0].rows[0].name.text == "nat");
        CHECK(e.registrations[0].rows[0].function.kind == SymValue::Kind::function_ref);
    }

    TEST_CASE("exploring a missing function is an analysis error")
    {
        native::NativeModule m = testing::nir("module \"m\" {\n}\n");
        CHECK_THROWS_AS((void)SymbolicExecutor(m, {}).explore("nope", {}), AnalysisError);
    }
}
