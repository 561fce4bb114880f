#include <filesystem>

#include "crosslink/native/callgraph.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crosslink;
using namespace crosslink::native;

namespace {

const char *kModule = R"(
module "libdemo" {
    string @name = "run"

    table methods {
        ("nativeRun", "()V", impl)
    }

    table cells {
        (1, "x", ?)
    }

    fn JNI_OnLoad(env:env) {
        c = const-str "demo/Main"
        cls = FindClass(env, c)
        RegisterNatives(env, cls, &methods, 1)
        ret
    }

    fn impl(env:env, self:object) {
        v = call helper(env, 2)
        store-table-entry &cells, 0, 2, v
        ret
    }

    fn helper(env:env, n:int) {
        m = add n, 1
        branch-if m > 2, Lbig
        ret n
    Lbig:
        ret m
    }

    export fn Java_demo_Main_other(env:env, self:object) {
        call impl(env, self)
        ret
    }
}
)";

} // namespace

TEST_SUITE("native")
{
    TEST_CASE("a module parses into functions, tables and a string pool")
    {
        NativeModule m = testing::nir(kModule);
        CHECK(m.name == "libdemo");
        CHECK(m.functions.size() == 4);
        CHECK(m.string_pool.at("name") == "run");
        REQUIRE(m.find_table("cells"));
        CHECK(m.find_table("cells")->rows[0][2].kind == Operand::Kind::hole);
        CHECK(m.exported_symbols() == std::vector<std::string>{"Java_demo_Main_other"});
        const NativeFunction *h = m.find_function("helper");
        REQUIRE(h);
        CHECK(h->params[1].type == TypeTag::integer);
        CHECK(h->instrs[1].op == Opcode::branch_if);
        CHECK(h->instrs[1].cmp == CmpOp::gt);
        CHECK(h->label_index("Lbig") == std::size_t{3});
    }

    TEST_CASE("printing then parsing gives the same module")
    {
        NativeModule m = testing::nir(kModule);
        CHECK(parse_native(print_native(m)) == m);
    }

    TEST_CASE("every corpus native file round-trips")
    {
        std::size_t files = 0;
        for (const auto &e : std::filesystem::recursive_directory_iterator(testing::corpus()))
        {
            if (e.path().extension() != ".nir")
                continue;
            NativeModule m = parse_native(pipeline::read_file(e.path()), e.path().string());
            CHECK(parse_native(print_native(m)) == m);
            ++files;
        }
        CHECK(files >= 29);
    }

    TEST_CASE("the call graph holds direct calls only")
    {
        NativeCallGraph g = build_native_cg(testing::nir(kModule));
        CHECK(g.nodes.size() == 4);
        std::set<std::pair<std::string, std::string>> want{{"Java_demo_Main_other", "impl"}, {"impl", "helper"}};
        CHECK(g.edges == want);
        CHECK(g.successors("impl") == std::set<std::string>{"helper"});
        CHECK(g.successors("JNI_OnLoad").empty());
    }

    TEST_CASE("malformed modules are rejected with a position")
    {
        auto line_of = [](const std::string &body) {
            try
            {
                (void)testing::nir("module \"m\" {\n" + body + "}\n");
            }
            catch (const InputError &e)
            {
                return e.pos().line;
            }
            return -1;
        };
        CHECK(line_of("fn f(env:env) {\n    call g(env)\n    ret\n}\n") == 3);
        CHECK(line_of("fn f(env:env) {\n    goto Lmissing\n}\n") == 3);
        CHECK(line_of("fn f(env:env) {\n    x = FindClass(env)\n    ret\n}\n") == 3);
        CHECK(line_of("fn f(env:env) {\n    x = Frobnicate(env, env)\n    ret\n}\n") == 3);
        CHECK(line_of("fn f(env:env, a:int) {\n    x = call f(env)\n    ret\n}\n") == 3);
        CHECK(line_of("fn f(env:env) {\n    x = const-int \"no\"\n    ret\n}\n") == 3);
        CHECK(line_of("fn f(env:env, x:float) {\n    ret\n}\n") == 2);
        CHECK(line_of("table t {\n    (\"a\", \"()V\", f)\n}\nfn f(env:env) {\n    "
                      "c = const-str \"A\"\n    k = FindClass(env, c)\n    RegisterNatives(env, k, &t, 2)\n    ret\n}\n") ==
              8);
        CHECK(line_of("fn f(env:env) {\n    ret\n}\nfn f(env:env) {\n    ret\n}\n") > 0);
    }

    TEST_CASE("intrinsic metadata")
    {
        CHECK(is_method_call(Intrinsic::CallIntMethod));
        CHECK(is_static_method_call(Intrinsic::CallStaticVoidMethod));
        CHECK_FALSE(is_static_method_call(Intrinsic::CallVoidMethod));
        CHECK_FALSE(is_method_call(Intrinsic::NewObject));
        CHECK(parse_intrinsic("GetStaticMethodID") == Intrinsic::GetStaticMethodID);
        CHECK_FALSE(parse_intrinsic("GetFieldID"));
        CHECK(intrinsic_is_variadic(Intrinsic::CallObjectMethod));
        CHECK_FALSE(intrinsic_returns_value(Intrinsic::CallVoidMethod));
    }
}
