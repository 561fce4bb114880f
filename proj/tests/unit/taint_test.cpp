#include "crosslink/taint/taint.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crosslink;
using namespace crosslink::taint;
using managed::MethodId;

namespace {

const char *kFramework = R"(
class f.Dev {
    static extern string secret()
    static extern string plain()
}

class f.Out {
    static extern void send(string where, string what)
}
)";

const char *kConfig = "# test rules\n"
                      "source Lf/Dev;->secret()Ljava/lang/String;\n"
                      "sink:1 Lf/Out;->send(Ljava/lang/String;Ljava/lang/String;)V\n";

TaintResult analyze(const std::string &app)
{
    std::vector<SourceFile> files{{"app.mir", app}, {"fw.mir", kFramework}};
    managed::ManagedProgram p = managed::parse_managed(files);
    TaintConfig cfg = parse_taint_config(kConfig);
    TaintResult r = taint_analyze(p, cfg);
    for (const auto &f : r.findings)
        CHECK_MESSAGE(check_witness(p, cfg, f).empty(), check_witness(p, cfg, f));
    return r;
}

} // namespace

TEST_SUITE("taint")
{
    TEST_CASE("configuration lines name sources and sink positions")
    {
        TaintConfig c = parse_taint_config(kConfig);
        CHECK(c.sources.size() == 1);
        REQUIRE(c.sinks.size() == 1);
        CHECK(c.sinks.begin()->second == std::set<std::size_t>{1});
        TaintConfig multi = parse_taint_config("sink:0,1 Lf/Out;->send(Ljava/lang/String;Ljava/lang/String;)V\n");
        CHECK(multi.sinks.begin()->second == std::set<std::size_t>{0, 1});
        CHECK_THROWS_AS((void)parse_taint_config("sink Lf/Out;->send()V\n"), InputError);
        CHECK_THROWS_AS((void)parse_taint_config("drain Lf/Out;->send()V\n"), InputError);
        CHECK_THROWS_AS((void)parse_taint_config("sink:5 Lf/Out;->send(Ljava/lang/String;)V\n"), InputError);
    }

    TEST_CASE("a direct flow is reported with its witness")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        var string s
        var string t
        var string w
        s = invoke static f.Dev.secret()
        t = s
        w = const "net"
        invoke static f.Out.send(w, t)
        return
    }
}
entrypoint La/M;->main()V
)");
        REQUIRE(r.findings.size() == 1);
        const Finding &f = r.findings[0];
        CHECK(f.source.str() == "M.main@0");
        CHECK(f.sink.str() == "M.main@3");
        CHECK(f.arg_pos == 1);
        CHECK_FALSE(f.crosses_native);
        REQUIRE(f.witness.size() == 3);
        CHECK(f.witness.front().kind == HopKind::source);
        CHECK(f.witness[1].kind == HopKind::assign);
        CHECK(f.witness.back().kind == HopKind::sink);
    }

    TEST_CASE("only the configured argument position is a sink")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        var string s
        var string w
        s = invoke static f.Dev.secret()
        w = const "net"
        invoke static f.Out.send(s, w)
        return
    }
}
entrypoint La/M;->main()V
)");
        CHECK(r.findings.empty());
    }

    TEST_CASE("flows through parameters and return values")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        var string s
        var string t
        s = invoke static a.M.get()
        t = invoke static a.M.pass(s)
        invoke static a.M.leak(t)
        return
    }

    static string get() {
        var string v
        v = invoke static f.Dev.secret()
        return v
    }

    static string pass(string x) {
        return x
    }

    static void leak(string y) {
        var string w
        w = const "net"
        invoke static f.Out.send(w, y)
        return
    }
}
entrypoint La/M;->main()V
)");
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].source.str() == "M.get@0");
        CHECK(r.findings[0].sink.str() == "M.leak@1");
        CHECK(r.iterations >= 1);
    }

    TEST_CASE("overwriting a tainted local clears it")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        var string s
        var string w
        s = invoke static f.Dev.secret()
        s = const "clean"
        w = const "net"
        invoke static f.Out.send(w, s)
        s = invoke static f.Dev.secret()
        s = invoke static f.Dev.plain()
        invoke static f.Out.send(w, s)
        return
    }
}
entrypoint La/M;->main()V
)");
        CHECK(r.findings.empty());
    }

    TEST_CASE("taint merges at join points")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main(int k) {
        var string s
        var string w
        var int zero
        zero = const 0
        s = const "clean"
        if k == zero goto Lskip
        s = invoke static f.Dev.secret()
    Lskip:
        w = const "net"
        invoke static f.Out.send(w, s)
        return
    }
}
entrypoint La/M;->main(I)V
)");
        REQUIRE(r.findings.size() == 1);
        CHECK(r.findings[0].sink.str() == "M.main@6");
    }

    TEST_CASE("methods outside the scope are not analyzed")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        return
    }

    void unused() {
        var string s
        var string w
        s = invoke static f.Dev.secret()
        w = const "net"
        invoke static f.Out.send(w, s)
        return
    }
}
entrypoint La/M;->main()V
)");
        CHECK(r.findings.empty());
        CHECK(r.scope.size() == 1);
    }

    TEST_CASE("forged witnesses are rejected")
    {
        std::vector<SourceFile> files{{"app.mir", R"(
class a.M {
    void main() {
        var string s
        var string w
        s = invoke static f.Dev.secret()
        w = const "net"
        invoke static f.Out.send(w, s)
        return
    }
}
entrypoint La/M;->main()V
)"},
                                      {"fw.mir", kFramework}};
        managed::ManagedProgram p = managed::parse_managed(files);
        TaintConfig cfg = parse_taint_config(kConfig);
        TaintResult r = taint_analyze(p, cfg);
        REQUIRE(r.findings.size() == 1);
        CHECK(check_witness(p, cfg, r.findings[0]).empty());

        Finding wrong_local = r.findings[0];
        wrong_local.witness.front().local = "w";
        CHECK_FALSE(check_witness(p, cfg, wrong_local).empty());

        Finding wrong_site = r.findings[0];
        wrong_site.witness.back().site.index = 1;
        CHECK_FALSE(check_witness(p, cfg, wrong_site).empty());

        Finding empty = r.findings[0];
        empty.witness.clear();
        CHECK_FALSE(check_witness(p, cfg, empty).empty());
    }

    TEST_CASE("findings render as JSON and as a table")
    {
        TaintResult r = analyze(R"(
class a.M {
    void main() {
        var string s
        var string w
        s = invoke static f.Dev.secret()
        w = const "net"
        invoke static f.Out.send(w, s)
        return
    }
}
entrypoint La/M;->main()V
)");
        Json j = findings_to_json(r);
        CHECK(j["schema"] == findings_schema);
        CHECK(j["findings"].size() == 1);
        std::string table = findings_table(r);
        CHECK(table.find("M.main@0") != std::string::npos);
        CHECK(table.find("arg 1") != std::string::npos);
    }
}
