#include <atomic>
#include <fstream>

#include "crosslink/pipeline/bench.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace crosslink;
using namespace crosslink::pipeline;
namespace fs = std::filesystem;

namespace {

void write(const fs::path &p, const std::string &text)
{
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << text;
}

} // namespace

TEST_SUITE("pipeline")
{
    TEST_CASE("settings parse and reject bad values")
    {
        RunConfig c;
        SourcePos pos{"cfg", 1, 1};
        apply_setting(c, "paths-limit", "12", pos);
        apply_setting(c, "perm-cap", "3", pos);
        apply_setting(c, "loop-unroll", "0", pos);
        CHECK(c.budget.max_paths == 12);
        CHECK(c.perm_cap == 3);
        CHECK(c.budget.loop_unroll == 0);
        CHECK_THROWS_AS(apply_setting(c, "paths-limit", "0", pos), InputError);
        CHECK_THROWS_AS(apply_setting(c, "depth-limit", "-1", pos), InputError);
        CHECK_THROWS_AS(apply_setting(c, "jobs", "two", pos), InputError);
        CHECK_THROWS_AS(apply_setting(c, "speed", "1", pos), InputError);
        CHECK_THROWS_AS(apply_setting(c, "instr-limit", "99999999999999999999999", pos), InputError);
    }

    TEST_CASE("config files are key=value with comments")
    {
        fs::path dir = testing::scratch("config");
        write(dir / "run.cfg", "# limits\npaths-limit = 8\n\ndepth-limit=4   # inline\nout = results\n");
        RunConfig c = load_config_file(dir / "run.cfg");
        CHECK(c.budget.max_paths == 8);
        CHECK(c.budget.max_depth == 4);
        CHECK(c.out_dir == "results");
        write(dir / "bad.cfg", "paths-limit 8\n");
        try
        {
            (void)load_config_file(dir / "bad.cfg");
            FAIL("expected an error");
        }
        catch (const InputError &e)
        {
            CHECK(e.pos().line == 1);
        }
        CHECK_THROWS_AS((void)load_config_file(dir / "missing.cfg"), InputError);
    }

    TEST_CASE("case files list inputs and expectations")
    {
        CaseSpec c = load_case(testing::corpus() / "motivation");
        CHECK(c.suite == "motivation");
        CHECK(c.managed.size() == 2);
        CHECK(c.native == std::vector<std::string>{"libnative.nir"});
        CHECK(c.leak == true);
        CHECK(c.expect_exits.size() == 2);

        fs::path dir = testing::scratch("badcase");
        write(dir / "case.meta", "suite = x\nmanaged = a.mir\nwhatever = 1\n");
        CHECK_THROWS_AS((void)load_case(dir), InputError);
        write(dir / "case.meta", "suite = x\n");
        CHECK_THROWS_AS((void)load_case(dir), InputError);
    }

    TEST_CASE("the motivating case reaches the hidden callbacks and leaks")
    {
        PipelineResult r = run_pipeline(load_case_inputs(load_case(testing::corpus() / "motivation")), {});
        CaseSpec c = load_case(testing::corpus() / "motivation");
        CHECK(entry_strings(r.bindings) == c.expect_entries);
        std::vector<std::string> exits = exit_strings(r.bindings);
        std::sort(exits.begin(), exits.end());
        CHECK(exits == c.expect_exits);
        for (const auto &want : c.expect_newly_reachable)
            CHECK(std::count(r.merged.reach.newly_reachable.begin(), r.merged.reach.newly_reachable.end(), want) == 1);
        REQUIRE(r.findings);
        CHECK(r.findings->findings.size() == 1);
        CHECK(r.findings->findings[0].crosses_native);
        REQUIRE(r.baseline);
        CHECK(r.baseline->findings.empty());
        for (const char *name : {"bindings.json", "graph.dot", "graph.json", "reachability.json", "stubs.json",
                                 "patched.mir", "findings.json", "findings.txt"})
            CHECK_MESSAGE(r.artifacts.count(name) == 1, name);
    }

    TEST_CASE("artifacts are written atomically and repeat byte for byte")
    {
        Inputs in = load_case_inputs(load_case(testing::corpus() / "motivation"));
        PipelineResult a = run_pipeline(in, {});
        PipelineResult b = run_pipeline(in, {});
        CHECK(a.artifacts == b.artifacts);
        fs::path dir = testing::scratch("artifacts");
        write_artifacts(a, dir);
        std::size_t files = 0;
        for (const auto &e : fs::directory_iterator(dir))
        {
            CHECK(e.path().extension() != ".partial");
            CHECK(read_file(e.path()) == a.artifacts.at(e.path().filename().string()));
            ++files;
        }
        CHECK(files == a.artifacts.size());
    }

    TEST_CASE("a failed write leaves no partial files behind")
    {
        Inputs in = load_case_inputs(load_case(testing::corpus() / "motivation"));
        PipelineResult r = run_pipeline(in, {});
        fs::path dir = testing::scratch("blocked");
        fs::create_directories(dir / "graph.dot"); // a directory where a file must go
        CHECK_THROWS_AS(write_artifacts(r, dir), AnalysisError);
        for (const auto &e : fs::directory_iterator(dir))
            CHECK(e.path().filename() == "graph.dot");
    }

    TEST_CASE("manifest verification catches edits, additions and removals")
    {
        fs::path root = testing::scratch("manifest");
        write(root / "a/x.mir", "class X {\n}\n");
        write(root / "b.txt", "hello\n");
        write(root / "MANIFEST", build_manifest(root));
        CHECK_NOTHROW(verify_manifest(root));
        CHECK(read_file(root / "MANIFEST").find("MANIFEST") == std::string::npos);

        write(root / "b.txt", "hellO\n");
        CHECK_THROWS_AS(verify_manifest(root), InputError);
        write(root / "b.txt", "hello\n");
        write(root / "c.txt", "new\n");
        CHECK_THROWS_AS(verify_manifest(root), InputError);
        fs::remove(root / "c.txt");
        fs::remove(root / "a/x.mir");
        CHECK_THROWS_AS(verify_manifest(root), InputError);
    }

    TEST_CASE("FNV-1a matches its reference values")
    {
        CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
        CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
        CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
    }

    TEST_CASE("cases are discovered in natural order")
    {
        std::vector<CaseSpec> cases = discover_cases(testing::corpus(), "rq2");
        REQUIRE(cases.size() == 16);
        for (std::size_t i = 0; i < cases.size(); ++i)
            CHECK(cases[i].name == "bm" + std::to_string(i + 1));
    }

    TEST_CASE("parallel_for runs every index and rethrows")
    {
        std::vector<std::atomic<int>> hits(50);
        parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
        for (auto &h : hits)
            CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(10, 3,
                                     [](std::size_t i) {
                                         if (i == 7)
                                             throw AnalysisError("boom");
                                     }),
                        AnalysisError);
    }

    TEST_CASE("scores use the usual definitions")
    {
        CHECK(precision(9, 2) == doctest::Approx(9.0 / 11));
        CHECK(recall(9, 0) == 1.0);
        CHECK(f1(9, 2, 0) == doctest::Approx(0.9));
        CHECK(precision(0, 0) == 0.0);
        CHECK(recall(0, 9) == 0.0);
        CHECK(f1(0, 0, 9) == 0.0);
    }

    TEST_CASE("benchmark results do not depend on the worker count")
    {
        RunConfig one, four;
        four.jobs = 4;
        CHECK(rq2_to_json(bench_rq2(testing::corpus(), one)).dump() ==
              rq2_to_json(bench_rq2(testing::corpus(), four)).dump());
        CHECK(rq3_to_json(bench_rq3(testing::corpus(), one)).dump() ==
              rq3_to_json(bench_rq3(testing::corpus(), four)).dump());
    }
}
