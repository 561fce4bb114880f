#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "crosslink/bridge/manifest.hpp"
#include "crosslink/pipeline/bench.hpp"
#include "crosslink/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace crosslink;

namespace {

struct Flags
{
    std::string config;
    std::optional<std::size_t> paths_limit, depth_limit, instr_limit, perm_cap, jobs;
    std::optional<std::string> out;

    void attach(CLI::App &cmd)
    {
        cmd.add_option("--config", config, "key=value settings file")->check(CLI::ExistingFile);
        cmd.add_option("--paths-limit", paths_limit, "symbolic paths per explored function (default 256)");
        cmd.add_option("--depth-limit", depth_limit, "native call depth (default 16)");
        cmd.add_option("--instr-limit", instr_limit, "instructions per path (default 10000)");
        cmd.add_option("--perm-cap", perm_cap, "argument tuples per stub call (default 64)");
        cmd.add_option("--jobs", jobs, "worker threads for benchmarks");
        cmd.add_option("--out", out, "output directory");
    }

    pipeline::RunConfig resolve() const
    {
        pipeline::RunConfig cfg;
        if (!config.empty())
            cfg = pipeline::load_config_file(config, cfg);
        SourcePos cli{"<command line>", 0, 0};
        auto set = [&](const char *key, const std::optional<std::size_t> &v) {
            if (v)
                pipeline::apply_setting(cfg, key, std::to_string(*v), cli);
        };
        set("paths-limit", paths_limit);
        set("depth-limit", depth_limit);
        set("instr-limit", instr_limit);
        set("perm-cap", perm_cap);
        set("jobs", jobs);
        if (out)
            cfg.out_dir = *out;
        return cfg;
    }
};

struct InputFlags
{
    std::string case_dir;
    std::vector<std::string> managed, native;
    std::string taint;

    void attach(CLI::App &cmd)
    {
        cmd.add_option("case", case_dir, "case directory containing case.meta");
        cmd.add_option("--managed", managed, "managed IR files")->expected(1, -1);
        cmd.add_option("--native", native, "native IR files")->expected(1, -1);
        cmd.add_option("--taint", taint, "taint source/sink configuration");
    }

    pipeline::Inputs load() const
    {
        if (!case_dir.empty())
        {
            if (!managed.empty() || !native.empty() || !taint.empty())
                throw InputError({"<command line>", 0, 0}, "give either a case directory or input files, not both");
            return pipeline::load_case_inputs(pipeline::load_case(case_dir));
        }
        if (managed.empty())
            throw InputError({"<command line>", 0, 0}, "no input: give a case directory or --managed files");
        std::vector<fs::path> m(managed.begin(), managed.end()), n(native.begin(), native.end());
        std::optional<fs::path> t;
        if (!taint.empty())
            t = taint;
        return pipeline::load_inputs(m, n, t);
    }
};

void write_text(const fs::path &path, const std::string &text)
{
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out)
        throw AnalysisError("cannot write " + path.string());
}

int run(int argc, char **argv)
{
    CLI::App app{"Cross-language call graphs, bindings and taint flows for managed/native programs"};
    app.require_subcommand(1);

    Flags analyze_flags, graph_flags, bindings_flags, taint_flags, bench_flags;
    InputFlags analyze_in, graph_in, bindings_in, taint_in;

    auto *analyze = app.add_subcommand("analyze", "run the full pipeline and write every artifact");
    analyze_in.attach(*analyze);
    analyze_flags.attach(*analyze);

    std::string graph_format = "dot";
    auto *graph = app.add_subcommand("graph", "print the unified call graph");
    graph_in.attach(*graph);
    graph_flags.attach(*graph);
    graph->add_option("--format", graph_format, "dot or json")->check(CLI::IsMember({"dot", "json"}));

    auto *bindings = app.add_subcommand("bindings", "print entry and exit bindings as JSON");
    bindings_in.attach(*bindings);
    bindings_flags.attach(*bindings);

    std::string taint_format = "table";
    auto *taint_cmd = app.add_subcommand("taint", "run the taint analysis on the stubbed program");
    taint_in.attach(*taint_cmd);
    taint_flags.attach(*taint_cmd);
    taint_cmd->add_option("--format", taint_format, "table or json")->check(CLI::IsMember({"table", "json"}));

    std::string bench_which;
    std::string corpus = CROSSLINK_CORPUS_DIR;
    auto *bench = app.add_subcommand("bench", "run a corpus benchmark (rq2, rq3) or rewrite the corpus manifest");
    bench->add_option("which", bench_which, "rq2, rq3 or manifest")
        ->required()
        ->check(CLI::IsMember({"rq2", "rq3", "manifest"}));
    bench->add_option("--corpus", corpus, "corpus root");
    bench_flags.attach(*bench);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (analyze->parsed())
    {
        pipeline::RunConfig cfg = analyze_flags.resolve();
        pipeline::PipelineResult r = pipeline::run_pipeline(analyze_in.load(), cfg);
        if (!cfg.out_dir.empty())
            pipeline::write_artifacts(r, cfg.out_dir);
        std::cout << "entries " << r.bindings.entries.size() << ", exits " << r.bindings.exits.size()
                  << ", unresolved " << r.bindings.unresolved.size() << "\n";
        std::cout << "newly reachable:";
        for (const auto &n : r.merged.reach.newly_reachable)
            std::cout << " " << r.merged.graph.nodes.at(n).label;
        std::cout << "\n";
        if (r.findings)
            std::cout << taint::findings_table(*r.findings);
        for (const auto &d : r.bindings.diagnostics)
            std::cerr << (d.pos.file.empty() ? std::string() : d.pos.str() + ": ") << to_string(d.severity) << ": "
                      << d.message << " [" << d.code << "]\n";
        return 0;
    }
    if (graph->parsed())
    {
        pipeline::RunConfig cfg = graph_flags.resolve();
        pipeline::PipelineResult r = pipeline::run_pipeline(graph_in.load(), cfg);
        std::string text = r.artifacts.at(graph_format == "dot" ? "graph.dot" : "graph.json");
        if (!cfg.out_dir.empty())
            write_text(fs::path(cfg.out_dir) / (graph_format == "dot" ? "graph.dot" : "graph.json"), text);
        else
            std::cout << text;
        return 0;
    }
    if (bindings->parsed())
    {
        pipeline::RunConfig cfg = bindings_flags.resolve();
        pipeline::Inputs in = bindings_in.load();
        bridge::BindingSet b = bridge::discover_bindings(in.program, in.modules, cfg.budget);
        std::string text = bridge::bindings_to_json(b).dump(2) + "\n";
        if (!cfg.out_dir.empty())
            write_text(fs::path(cfg.out_dir) / "bindings.json", text);
        else
            std::cout << text;
        return 0;
    }
    if (taint_cmd->parsed())
    {
        pipeline::RunConfig cfg = taint_flags.resolve();
        pipeline::Inputs in = taint_in.load();
        if (!in.taint)
            throw InputError({"<command line>", 0, 0}, "taint needs a taint configuration (--taint or case key)");
        pipeline::PipelineResult r = pipeline::run_pipeline(in, cfg);
        std::string text = taint_format == "json" ? r.artifacts.at("findings.json") : r.artifacts.at("findings.txt");
        if (!cfg.out_dir.empty())
            write_text(fs::path(cfg.out_dir) / (taint_format == "json" ? "findings.json" : "findings.txt"), text);
        else
            std::cout << text;
        return 0;
    }
    if (bench->parsed())
    {
        pipeline::RunConfig cfg = bench_flags.resolve();
        if (bench_which == "manifest")
        {
            write_text(fs::path(corpus) / "MANIFEST", pipeline::build_manifest(corpus));
            std::cout << "wrote " << (fs::path(corpus) / "MANIFEST").string() << "\n";
            return 0;
        }
        if (bench_which == "rq2")
        {
            pipeline::Rq2Summary s = pipeline::bench_rq2(corpus, cfg);
            std::cout << pipeline::format_rq2(s);
            if (!cfg.out_dir.empty())
                write_text(fs::path(cfg.out_dir) / "rq2.json", pipeline::rq2_to_json(s).dump(2) + "\n");
        }
        else
        {
            pipeline::Rq3Summary s = pipeline::bench_rq3(corpus, cfg);
            std::cout << pipeline::format_rq3(s);
            if (!cfg.out_dir.empty())
                write_text(fs::path(cfg.out_dir) / "rq3.json", pipeline::rq3_to_json(s).dump(2) + "\n");
        }
        return 0;
    }
    return 2;
}

} // namespace

int main(int argc, char **argv)
{
    try
    {
        return run(argc, argv);
    }
    catch (const InputError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    catch (const AnalysisError &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
