#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "crosslink/bridge/manifest.hpp"
#include "crosslink/pipeline/pipeline.hpp"

namespace crosslink::pipeline {

[[nodiscard]] std::uint64_t fnv1a64(std::string_view data);

/// `<hex hash>  <path>` per corpus file, sorted by path, MANIFEST excluded.
[[nodiscard]] std::string build_manifest(const std::filesystem::path &corpus_root);
/// Throws InputError naming the first missing, extra or modified file.
void verify_manifest(const std::filesystem::path &corpus_root);

/// Case directories of `corpus_root/suite`, ordered by name with digit runs
/// compared numerically (bm2 before bm10).
[[nodiscard]] std::vector<CaseSpec> discover_cases(const std::filesystem::path &corpus_root, const std::string &suite);

/// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)> &fn);

struct Rq2Case
{
    std::string name;
    std::size_t entry_tp = 0, entry_fp = 0, entry_fn = 0;
    std::size_t exit_tp = 0, exit_fp = 0, exit_fn = 0;
    std::vector<std::string> missing;   // expected but not found
    std::vector<std::string> spurious;  // found but not expected
    std::size_t unresolved = 0;
    [[nodiscard]] bool exits_complete() const { return exit_fn == 0; }
};

struct Rq2Summary
{
    std::vector<Rq2Case> cases;
    std::size_t entry_tp = 0, entry_fp = 0, entry_fn = 0;
    std::size_t exit_tp = 0, exit_fp = 0, exit_fn = 0;
    std::size_t complete_cases = 0;
    double seconds = 0;
};

struct Rq3Case
{
    std::string name;
    bool leak = false;
    bool flagged = false;
    bool baseline_flagged = false;
    std::size_t findings = 0;
};

struct Counts
{
    std::size_t tp = 0, fp = 0, fn = 0;
};

struct Rq3Summary
{
    std::vector<Rq3Case> cases;
    Counts pipeline, baseline;
    double seconds = 0;
};

/// Ratios in [0, 1]; an empty denominator counts as 0.
[[nodiscard]] double precision(std::size_t tp, std::size_t fp);
[[nodiscard]] double recall(std::size_t tp, std::size_t fn);
[[nodiscard]] double f1(std::size_t tp, std::size_t fp, std::size_t fn);

inline const std::vector<std::string> &rq2_case_names()
{
    static const std::vector<std::string> names = {"bm1",  "bm2",  "bm3",  "bm4",  "bm5",  "bm6",  "bm7",  "bm8",
                                                   "bm9",  "bm10", "bm11", "bm12", "bm13", "bm14", "bm15", "bm16"};
    return names;
}

inline const std::vector<std::string> &rq3_case_names()
{
    static const std::vector<std::string> names = {
        "delegation_imei", "delegation_proxy", "getter_imei",  "getter_imei_deep", "getter_leaker", "getter_proxy_leaker",
        "getter_string",   "leaker_imei",      "leaker_string", "proxy_double",    "proxy_imei"};
    return names;
}

[[nodiscard]] Rq2Summary bench_rq2(const std::filesystem::path &corpus_root, const RunConfig &cfg);
[[nodiscard]] Rq3Summary bench_rq3(const std::filesystem::path &corpus_root, const RunConfig &cfg);

[[nodiscard]] std::string format_rq2(const Rq2Summary &s);
[[nodiscard]] std::string format_rq3(const Rq3Summary &s);
[[nodiscard]] Json rq2_to_json(const Rq2Summary &s);
[[nodiscard]] Json rq3_to_json(const Rq3Summary &s);

} // namespace crosslink::pipeline
