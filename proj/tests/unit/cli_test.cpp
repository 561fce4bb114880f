#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "crosslink/bridge/manifest.hpp"
#include "doctest.h"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome
{
    int status = -1;
    std::string out;
};

// Runs the command line tool with `args`; stdout is captured, stderr dropped.
Outcome cli(const std::string &args)
{
    std::string cmd = std::string("\"") + CROSSLINK_CLI + "\" " + args + " 2>/dev/null";
    Outcome o;
    FILE *pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;)
        o.out.append(buf, n);
    int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

std::string corpus(const std::string &rel) { return "\"" + (testing::corpus() / rel).string() + "\""; }

} // namespace

TEST_SUITE("cli")
{
    TEST_CASE("analyze succeeds on a case directory")
    {
        fs::path out = testing::scratch("cli-analyze");
        Outcome o = cli("analyze " + corpus("motivation") + " --out \"" + out.string() + "\"");
        CHECK(o.status == 0);
        CHECK(o.out.find("entries 1, exits 2") != std::string::npos);
        CHECK(o.out.find("MainActivity.malicious") != std::string::npos);
        CHECK(fs::exists(out / "graph.dot"));
        CHECK(fs::exists(out / "findings.json"));
    }

    TEST_CASE("graph prints DOT or JSON")
    {
        Outcome dot = cli("graph " + corpus("motivation"));
        CHECK(dot.status == 0);
        CHECK(dot.out.rfind("digraph unigraph {", 0) == 0);
        Outcome json = cli("graph " + corpus("motivation") + " --format json");
        CHECK(json.status == 0);
        CHECK(crosslink::Json::parse(json.out)["schema"] == "crosslink.graph/1");
        CHECK(cli("graph " + corpus("motivation") + " --format svg").status == 2);
    }

    TEST_CASE("inputs may be given as files")
    {
        Outcome o = cli("bindings --managed " + corpus("rq2/bm2/app.mir") + " --native " + corpus("rq2/bm2/libbm2.nir"));
        CHECK(o.status == 0);
        CHECK(crosslink::Json::parse(o.out)["entries"].size() == 2);
        Outcome t = cli("taint --format json --managed " + corpus("motivation/app.mir") + " " +
                        corpus("common/android.mir") + " --native " + corpus("motivation/libnative.nir") + " --taint " +
                        corpus("common/taint.cfg"));
        CHECK(t.status == 0);
        CHECK(crosslink::Json::parse(t.out)["findings"].size() == 1);
    }

    TEST_CASE("budgets from flags reach the executor")
    {
        Outcome o = cli("bindings " + corpus("rq2/bm7") + " --paths-limit 1");
        CHECK(o.status == 0);
        crosslink::Json j = crosslink::Json::parse(o.out);
        CHECK(j["exits"].size() == 1);
        CHECK(j["unresolved"][0]["reason"] == "path budget exhausted");
    }

    TEST_CASE("a config file supplies settings and flags override it")
    {
        fs::path dir = testing::scratch("cli-config");
        std::ofstream(dir / "run.cfg") << "paths-limit = 1\n";
        Outcome capped = cli("bindings " + corpus("rq2/bm7") + " --config \"" + (dir / "run.cfg").string() + "\"");
        CHECK(crosslink::Json::parse(capped.out)["exits"].size() == 1);
        Outcome freed = cli("bindings " + corpus("rq2/bm7") + " --config \"" + (dir / "run.cfg").string() +
                            "\" --paths-limit 8");
        CHECK(crosslink::Json::parse(freed.out)["exits"].size() == 2);
        std::ofstream(dir / "bad.cfg") << "colour = blue\n";
        CHECK(cli("bindings " + corpus("rq2/bm7") + " --config \"" + (dir / "bad.cfg").string() + "\"").status == 2);
    }

    TEST_CASE("input errors exit with status 2")
    {
        CHECK(cli("").status == 2);
        CHECK(cli("frobnicate").status == 2);
        CHECK(cli("analyze /nonexistent/case").status == 2);
        CHECK(cli("analyze " + corpus("motivation") + " --paths-limit 0").status == 2);
        CHECK(cli("analyze " + corpus("motivation") + " --managed x.mir").status == 2);
        CHECK(cli("bench rq9").status == 2);
        CHECK(cli("taint --managed " + corpus("motivation/app.mir") + " " + corpus("common/android.mir")).status == 2);

        fs::path dir = testing::scratch("cli-bad");
        std::ofstream(dir / "bad.mir") << "class A {\n    void f() {\n        x = const 1\n    }\n}\n";
        CHECK(cli("analyze --managed \"" + (dir / "bad.mir").string() + "\"").status == 2);
    }

    TEST_CASE("analysis errors exit with status 1")
    {
        fs::path dir = testing::scratch("cli-reserved");
        std::ofstream(dir / "app.mir") << "class DummyBinaryClass {\n}\n";
        CHECK(cli("analyze --managed \"" + (dir / "app.mir").string() + "\"").status == 1);
    }

    TEST_CASE("bench reports both suites")
    {
        fs::path out = testing::scratch("cli-bench");
        Outcome rq2 = cli("bench rq2 --jobs 2 --out \"" + out.string() + "\"");
        CHECK(rq2.status == 0);
        CHECK(rq2.out.find("cases with complete exits: 15/16") != std::string::npos);
        CHECK(fs::exists(out / "rq2.json"));
        Outcome rq3 = cli("bench rq3");
        CHECK(rq3.status == 0);
        CHECK(rq3.out.find("F1 90.00%") != std::string::npos);
    }

    TEST_CASE("help exits cleanly")
    {
        Outcome o = cli("--help");
        CHECK(o.status == 0);
        CHECK(o.out.find("analyze") != std::string::npos);
    }
}
