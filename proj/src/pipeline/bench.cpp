#include "crosslink/pipeline/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace crosslink::pipeline {

namespace fs = std::filesystem;

std::uint64_t fnv1a64(std::string_view data)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace {

std::map<std::string, std::uint64_t> hash_tree(const fs::path &root)
{
    std::map<std::string, std::uint64_t> out;
    for (const auto &entry : fs::recursive_directory_iterator(root))
    {
        if (!entry.is_regular_file())
            continue;
        std::string rel = fs::relative(entry.path(), root).generic_string();
        if (rel == "MANIFEST")
            continue;
        out[rel] = fnv1a64(read_file(entry.path()));
    }
    return out;
}

std::string hex(std::uint64_t v)
{
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bool natural_less(const std::string &a, const std::string &b)
{
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size())
    {
        if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j])))
        {
            std::size_t i2 = i, j2 = j;
            while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2])))
                ++i2;
            while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2])))
                ++j2;
            unsigned long long x = std::stoull(a.substr(i, i2 - i)), y = std::stoull(b.substr(j, j2 - j));
            if (x != y)
                return x < y;
            i = i2;
            j = j2;
            continue;
        }
        if (a[i] != b[j])
            return a[i] < b[j];
        ++i;
        ++j;
    }
    return a.size() - i < b.size() - j;
}

double elapsed_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string percent(double v)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
    return buf;
}

void require_cases(const std::vector<CaseSpec> &cases, const std::vector<std::string> &names, const fs::path &dir)
{
    std::set<std::string> have;
    for (const auto &c : cases)
        have.insert(c.name);
    for (const auto &n : names)
        if (!have.count(n))
            throw InputError({(dir / n).string(), 0, 0}, "required benchmark case is missing");
}

} // namespace

std::string build_manifest(const fs::path &corpus_root)
{
    std::ostringstream os;
    for (const auto &[path, h] : hash_tree(corpus_root))
        os << hex(h) << "  " << path << "\n";
    return os.str();
}

void verify_manifest(const fs::path &corpus_root)
{
    fs::path manifest = corpus_root / "MANIFEST";
    std::string text = read_file(manifest);
    std::map<std::string, std::string> listed;
    std::istringstream is(text);
    int line_no = 0;
    for (std::string line; std::getline(is, line);)
    {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string h, path;
        if (!(ls >> h >> path))
            throw InputError({manifest.string(), line_no, 1}, "expected '<hash>  <path>'");
        listed[path] = h;
    }
    auto actual = hash_tree(corpus_root);
    for (const auto &[path, h] : listed)
    {
        auto it = actual.find(path);
        if (it == actual.end())
            throw InputError({manifest.string(), 0, 0}, "listed file '" + path + "' is missing");
        if (hex(it->second) != h)
            throw InputError({manifest.string(), 0, 0}, "file '" + path + "' does not match its recorded hash");
    }
    for (const auto &[path, h] : actual)
        if (!listed.count(path))
            throw InputError({manifest.string(), 0, 0}, "file '" + path + "' is not listed");
}

std::vector<CaseSpec> discover_cases(const fs::path &corpus_root, const std::string &suite)
{
    fs::path dir = corpus_root / suite;
    if (!fs::is_directory(dir))
        throw InputError({dir.string(), 0, 0}, "no such suite directory");
    std::vector<std::string> names;
    for (const auto &entry : fs::directory_iterator(dir))
        if (entry.is_directory() && fs::exists(entry.path() / "case.meta"))
            names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end(), natural_less);
    std::vector<CaseSpec> out;
    for (const auto &n : names)
        out.push_back(load_case(dir / n));
    return out;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn)
{
    jobs = std::max<std::size_t>(1, std::min(jobs, n));
    if (jobs == 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (std::size_t i; (i = next++) < n;)
            {
                try
                {
                    fn(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                }
            }
        });
    for (auto &t : workers)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

double precision(std::size_t tp, std::size_t fp)
{
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double recall(std::size_t tp, std::size_t fn)
{
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double f1(std::size_t tp, std::size_t fp, std::size_t fn)
{
    double p = precision(tp, fp), r = recall(tp, fn);
    return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

Rq2Summary bench_rq2(const fs::path &corpus_root, const RunConfig &cfg)
{
    auto t0 = std::chrono::steady_clock::now();
    verify_manifest(corpus_root);
    std::vector<CaseSpec> cases = discover_cases(corpus_root, "rq2");
    require_cases(cases, rq2_case_names(), corpus_root / "rq2");

    Rq2Summary s;
    s.cases.resize(cases.size());
    parallel_for(cases.size(), cfg.jobs, [&](std::size_t i) {
        const CaseSpec &c = cases[i];
        Inputs in = load_case_inputs(c);
        bridge::BindingSet b = bridge::discover_bindings(in.program, in.modules, cfg.budget);
        Rq2Case r;
        r.name = c.name;
        r.unresolved = b.unresolved.size();
        auto score = [&](const std::vector<std::string> &expected, const std::vector<std::string> &found,
                         std::size_t &tp, std::size_t &fp, std::size_t &fn) {
            std::set<std::string> exp(expected.begin(), expected.end()), got(found.begin(), found.end());
            for (const auto &e : exp)
            {
                if (got.count(e))
                    ++tp;
                else
                {
                    ++fn;
                    r.missing.push_back(e);
                }
            }
            for (const auto &g : got)
                if (!exp.count(g))
                {
                    ++fp;
                    r.spurious.push_back(g);
                }
        };
        score(c.expect_entries, entry_strings(b), r.entry_tp, r.entry_fp, r.entry_fn);
        score(c.expect_exits, exit_strings(b), r.exit_tp, r.exit_fp, r.exit_fn);
        s.cases[i] = std::move(r);
    });
    for (const auto &r : s.cases)
    {
        s.entry_tp += r.entry_tp;
        s.entry_fp += r.entry_fp;
        s.entry_fn += r.entry_fn;
        s.exit_tp += r.exit_tp;
        s.exit_fp += r.exit_fp;
        s.exit_fn += r.exit_fn;
        s.complete_cases += r.exits_complete();
    }
    s.seconds = elapsed_since(t0);
    return s;
}

Rq3Summary bench_rq3(const fs::path &corpus_root, const RunConfig &cfg)
{
    auto t0 = std::chrono::steady_clock::now();
    verify_manifest(corpus_root);
    std::vector<CaseSpec> cases = discover_cases(corpus_root, "rq3");
    require_cases(cases, rq3_case_names(), corpus_root / "rq3");

    Rq3Summary s;
    s.cases.resize(cases.size());
    parallel_for(cases.size(), cfg.jobs, [&](std::size_t i) {
        const CaseSpec &c = cases[i];
        if (!c.leak)
            throw InputError({(c.dir / "case.meta").string(), 0, 0}, "rq3 case needs a leak = true|false key");
        Inputs in = load_case_inputs(c);
        if (!in.taint)
            throw InputError({(c.dir / "case.meta").string(), 0, 0}, "rq3 case needs a taint configuration");
        PipelineResult r = run_pipeline(in, cfg);
        Rq3Case out;
        out.name = c.name;
        out.leak = *c.leak;
        out.findings = r.findings->findings.size();
        out.flagged = out.findings > 0;
        out.baseline_flagged = !r.baseline->findings.empty();
        s.cases[i] = out;
    });
    auto tally = [](Counts &k, bool leak, bool flagged) {
        if (flagged && leak)
            ++k.tp;
        else if (flagged)
            ++k.fp;
        else if (leak)
            ++k.fn;
    };
    for (const auto &c : s.cases)
    {
        tally(s.pipeline, c.leak, c.flagged);
        tally(s.baseline, c.leak, c.baseline_flagged);
    }
    s.seconds = elapsed_since(t0);
    return s;
}

std::string format_rq2(const Rq2Summary &s)
{
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "%-6s %9s %9s %9s %9s  %s\n", "case", "entry", "entry-fn", "exit", "exit-fn",
                  "complete");
    os << line;
    for (const auto &c : s.cases)
    {
        std::snprintf(line, sizeof line, "%-6s %4zu/%-4zu %9zu %4zu/%-4zu %9zu  %s\n", c.name.c_str(), c.entry_tp,
                      c.entry_tp + c.entry_fn, c.entry_fn, c.exit_tp, c.exit_tp + c.exit_fn, c.exit_fn,
                      c.exits_complete() ? "yes" : "no");
        os << line;
        for (const auto &m : c.missing)
            os << "       missing  " << m << "\n";
        for (const auto &f : c.spurious)
            os << "       spurious " << f << "\n";
    }
    os << "entries: TP " << s.entry_tp << " FP " << s.entry_fp << " FN " << s.entry_fn << "  precision "
       << percent(precision(s.entry_tp, s.entry_fp)) << "  recall " << percent(recall(s.entry_tp, s.entry_fn))
       << "\n";
    os << "exits:   TP " << s.exit_tp << " FP " << s.exit_fp << " FN " << s.exit_fn << "  precision "
       << percent(precision(s.exit_tp, s.exit_fp)) << "  recall " << percent(recall(s.exit_tp, s.exit_fn)) << "\n";
    os << "cases with complete exits: " << s.complete_cases << "/" << s.cases.size() << "\n";
    return os.str();
}

std::string format_rq3(const Rq3Summary &s)
{
    std::ostringstream os;
    char line[200];
    std::snprintf(line, sizeof line, "%-22s %-6s %-9s %-9s %s\n", "case", "leak", "pipeline", "baseline", "findings");
    os << line;
    for (const auto &c : s.cases)
    {
        std::snprintf(line, sizeof line, "%-22s %-6s %-9s %-9s %zu\n", c.name.c_str(), c.leak ? "yes" : "no",
                      c.flagged ? "flagged" : "-", c.baseline_flagged ? "flagged" : "-", c.findings);
        os << line;
    }
    auto summary = [&](const char *label, const Counts &k) {
        os << label << "TP " << k.tp << " FP " << k.fp << " FN " << k.fn << "  precision "
           << percent(precision(k.tp, k.fp)) << "  recall " << percent(recall(k.tp, k.fn)) << "  F1 "
           << percent(f1(k.tp, k.fp, k.fn)) << "\n";
    };
    summary("pipeline: ", s.pipeline);
    summary("baseline: ", s.baseline);
    return os.str();
}

Json rq2_to_json(const Rq2Summary &s)
{
    Json cases = Json::array();
    for (const auto &c : s.cases)
        cases.push_back({{"case", c.name},
                         {"entry", {{"tp", c.entry_tp}, {"fp", c.entry_fp}, {"fn", c.entry_fn}}},
                         {"exit", {{"tp", c.exit_tp}, {"fp", c.exit_fp}, {"fn", c.exit_fn}}},
                         {"exits_complete", c.exits_complete()},
                         {"unresolved", c.unresolved},
                         {"missing", c.missing},
                         {"spurious", c.spurious}});
    return Json{{"schema", "crosslink.rq2/1"},
                {"cases", std::move(cases)},
                {"entry",
                 {{"tp", s.entry_tp},
                  {"fp", s.entry_fp},
                  {"fn", s.entry_fn},
                  {"precision", precision(s.entry_tp, s.entry_fp)},
                  {"recall", recall(s.entry_tp, s.entry_fn)}}},
                {"exit",
                 {{"tp", s.exit_tp},
                  {"fp", s.exit_fp},
                  {"fn", s.exit_fn},
                  {"precision", precision(s.exit_tp, s.exit_fp)},
                  {"recall", recall(s.exit_tp, s.exit_fn)}}},
                {"complete_cases", s.complete_cases}};
}

Json rq3_to_json(const Rq3Summary &s)
{
    Json cases = Json::array();
    for (const auto &c : s.cases)
        cases.push_back({{"case", c.name},
                         {"leak", c.leak},
                         {"flagged", c.flagged},
                         {"baseline_flagged", c.baseline_flagged},
                         {"findings", c.findings}});
    auto counts = [](const Counts &k) {
        return Json{{"tp", k.tp},
                    {"fp", k.fp},
                    {"fn", k.fn},
                    {"precision", precision(k.tp, k.fp)},
                    {"recall", recall(k.tp, k.fn)},
                    {"f1", f1(k.tp, k.fp, k.fn)}};
    };
    return Json{{"schema", "crosslink.rq3/1"},
                {"cases", std::move(cases)},
                {"pipeline", counts(s.pipeline)},
                {"baseline", counts(s.baseline)}};
}

} // namespace crosslink::pipeline
