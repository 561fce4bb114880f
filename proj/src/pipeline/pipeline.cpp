#include "crosslink/pipeline/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "crosslink/bridge/manifest.hpp"
#include "crosslink/managed/parser.hpp"
#include "crosslink/native/parser.hpp"
#include "crosslink/support/lexer.hpp"

namespace crosslink::pipeline {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s)
{
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    std::size_t e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::size_t parse_count(const std::string &key, const std::string &value, const SourcePos &pos, std::size_t min)
{
    if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
        throw InputError(pos, key + " expects a non-negative integer, found '" + value + "'");
    std::size_t n = 0;
    try
    {
        n = std::stoull(value);
    }
    catch (const std::out_of_range &)
    {
        throw InputError(pos, key + " value '" + value + "' is out of range");
    }
    if (n < min)
        throw InputError(pos, key + " must be at least " + std::to_string(min));
    return n;
}

std::vector<std::string> split_words(const std::string &s)
{
    std::istringstream is(s);
    std::vector<std::string> out;
    for (std::string w; is >> w;)
        out.push_back(w);
    return out;
}

std::string dump(const Json &j)
{
    return j.dump(2) + "\n";
}

} // namespace

void apply_setting(RunConfig &cfg, const std::string &key, const std::string &value, const SourcePos &pos)
{
    if (key == "paths-limit")
        cfg.budget.max_paths = parse_count(key, value, pos, 1);
    else if (key == "depth-limit")
        cfg.budget.max_depth = parse_count(key, value, pos, 1);
    else if (key == "instr-limit")
        cfg.budget.max_instructions = parse_count(key, value, pos, 1);
    else if (key == "loop-unroll")
        cfg.budget.loop_unroll = parse_count(key, value, pos, 0);
    else if (key == "perm-cap")
        cfg.perm_cap = parse_count(key, value, pos, 1);
    else if (key == "jobs")
        cfg.jobs = parse_count(key, value, pos, 1);
    else if (key == "out")
        cfg.out_dir = value;
    else
        throw InputError(pos, "unknown setting '" + key + "'");
}

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError({path.string(), 0, 0}, "cannot read file");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

RunConfig load_config_file(const fs::path &path, RunConfig base)
{
    std::string text = read_file(path);
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        std::string line(lines[i]);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        SourcePos pos{path.string(), static_cast<int>(i) + 1, 1};
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(pos, "expected key = value");
        apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), pos);
    }
    return base;
}

CaseSpec load_case(const fs::path &dir)
{
    CaseSpec c;
    c.dir = dir;
    c.name = dir.filename().string();
    fs::path meta = dir / "case.meta";
    std::string text = read_file(meta);
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        std::string line(lines[i]);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        SourcePos pos{meta.string(), static_cast<int>(i) + 1, 1};
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError(pos, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto expect_pair = [&](const std::string &v) {
            auto arrow = v.find("=>");
            if (arrow == std::string::npos)
                throw InputError(pos, key + " expects 'X => Y'");
            return trim(v.substr(0, arrow)) + " => " + trim(v.substr(arrow + 2));
        };
        if (key == "suite")
            c.suite = value;
        else if (key == "managed")
            for (auto &w : split_words(value))
                c.managed.push_back(w);
        else if (key == "native")
            for (auto &w : split_words(value))
                c.native.push_back(w);
        else if (key == "taint")
            c.taint = value;
        else if (key == "leak")
        {
            if (value != "true" && value != "false")
                throw InputError(pos, "leak expects true or false");
            c.leak = value == "true";
        }
        else if (key == "expect.entry")
            c.expect_entries.push_back(expect_pair(value));
        else if (key == "expect.exit")
            c.expect_exits.push_back(expect_pair(value));
        else if (key == "expect.newly_reachable")
            c.expect_newly_reachable.push_back(value);
        else
            throw InputError(pos, "unknown case key '" + key + "'");
    }
    if (c.managed.empty())
        throw InputError({meta.string(), 0, 0}, "case lists no managed files");
    return c;
}

Inputs load_inputs(const std::vector<fs::path> &managed_files, const std::vector<fs::path> &native_files,
                   const std::optional<fs::path> &taint_file, const fs::path &base_dir)
{
    Inputs in;
    std::vector<SourceFile> sources;
    for (const auto &f : managed_files)
        sources.push_back({f.generic_string(), read_file(base_dir / f)});
    in.program = managed::parse_managed(sources);
    for (const auto &f : native_files)
    {
        native::NativeModule m = native::parse_native(read_file(base_dir / f), f.generic_string());
        for (const auto &other : in.modules)
            if (other.name == m.name)
                throw InputError({f.generic_string(), 1, 1}, "duplicate module name '" + m.name + "'");
        in.modules.push_back(std::move(m));
    }
    if (taint_file)
        in.taint = taint::parse_taint_config(read_file(base_dir / *taint_file), taint_file->generic_string());
    return in;
}

Inputs load_case_inputs(const CaseSpec &c)
{
    std::vector<fs::path> managed(c.managed.begin(), c.managed.end());
    std::vector<fs::path> native(c.native.begin(), c.native.end());
    std::optional<fs::path> taint;
    if (!c.taint.empty())
        taint = c.taint;
    return load_inputs(managed, native, taint, c.dir);
}

std::vector<std::string> entry_strings(const bridge::BindingSet &b)
{
    std::vector<std::string> out;
    for (const auto &e : b.entries)
        out.push_back(e.method.canonical() + " => " + e.native_fn.node_id());
    return out;
}

std::vector<std::string> exit_strings(const bridge::BindingSet &b)
{
    std::vector<std::string> out;
    for (const auto &x : b.exits)
    {
        std::string s = x.in_function.node_id() + " => " + x.target.canonical();
        if (std::find(out.begin(), out.end(), s) == out.end())
            out.push_back(s);
    }
    return out;
}

PipelineResult run_pipeline(const Inputs &in, const RunConfig &cfg)
{
    PipelineResult r;
    r.bindings = bridge::discover_bindings(in.program, in.modules, cfg.budget);
    r.merged = unigraph::merge_and_patch(in.program, in.modules, r.bindings);
    r.stubs = stubgen::inject_stubs(in.program, r.bindings, {cfg.perm_cap});

    r.artifacts["bindings.json"] = dump(bridge::bindings_to_json(r.bindings));
    r.artifacts["graph.dot"] = unigraph::export_dot(r.merged.graph, r.merged.reach);
    r.artifacts["graph.json"] = dump(unigraph::export_json(r.merged.graph, r.merged.reach));
    r.artifacts["reachability.json"] = dump(unigraph::reachability_to_json(r.merged.reach, r.merged.pruning));
    r.artifacts["stubs.json"] = dump(stubgen::stubs_to_json(r.stubs));
    r.artifacts["patched.mir"] = managed::print_managed(r.stubs.program);

    if (in.taint)
    {
        std::set<managed::MethodId> scope = taint::invoke_reachable(r.stubs.program);
        for (const auto &id : r.merged.reach.reachable)
        {
            const auto &node = r.merged.graph.nodes.at(id);
            if (node.kind == unigraph::NodeKind::managed)
                scope.insert(managed::MethodId::parse(id));
        }
        r.findings = taint::taint_analyze(r.stubs.program, *in.taint, scope);
        r.baseline = taint::taint_analyze(in.program, *in.taint);
        for (const auto &f : r.findings->findings)
        {
            std::string problem = taint::check_witness(r.stubs.program, *in.taint, f);
            if (!problem.empty())
                throw AnalysisError("invalid witness for " + f.source.str() + " -> " + f.sink.str() + ": " + problem);
        }
        r.artifacts["findings.json"] = dump(taint::findings_to_json(*r.findings));
        r.artifacts["findings.txt"] = taint::findings_table(*r.findings);
    }
    return r;
}

void write_artifacts(const PipelineResult &r, const fs::path &dir)
{
    std::vector<fs::path> created;
    auto cleanup = [&] {
        std::error_code ec;
        for (const auto &p : created)
            fs::remove(p, ec);
    };
    try
    {
        fs::create_directories(dir);
        std::vector<std::pair<fs::path, fs::path>> staged;
        for (const auto &[name, content] : r.artifacts)
        {
            fs::path tmp = dir / (name + ".partial");
            created.push_back(tmp);
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << content;
            out.close();
            if (!out)
                throw AnalysisError("cannot write artifact " + tmp.string());
            staged.emplace_back(tmp, dir / name);
        }
        for (const auto &[tmp, final_path] : staged)
        {
            fs::rename(tmp, final_path);
            created.push_back(final_path);
        }
    }
    catch (const fs::filesystem_error &e)
    {
        cleanup();
        throw AnalysisError(std::string("cannot write artifacts: ") + e.what());
    }
    catch (...)
    {
        cleanup();
        throw;
    }
}

} // namespace crosslink::pipeline
