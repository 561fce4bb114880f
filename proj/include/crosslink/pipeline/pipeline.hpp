#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "crosslink/bridge/bindings.hpp"
#include "crosslink/managed/program.hpp"
#include "crosslink/native/module.hpp"
#include "crosslink/stubgen/stubgen.hpp"
#include "crosslink/taint/taint.hpp"
#include "crosslink/unigraph/graph.hpp"

namespace crosslink::pipeline {

struct RunConfig
{
    bridge::ExecBudget budget;
    std::size_t perm_cap = 64;
    std::size_t jobs = 1;
    std::string out_dir;
};

/// Applies one `key = value` setting (paths-limit, depth-limit, instr-limit,
/// loop-unroll, perm-cap, jobs, out). Throws InputError at `pos`.
void apply_setting(RunConfig &cfg, const std::string &key, const std::string &value, const SourcePos &pos);

/// Reads a key=value file; blank lines and `#` comments are ignored.
[[nodiscard]] RunConfig load_config_file(const std::filesystem::path &path, RunConfig base = {});

[[nodiscard]] std::string read_file(const std::filesystem::path &path);

/// A corpus case: `case.meta` plus the input files it names.
struct CaseSpec
{
    std::string name;
    std::filesystem::path dir;
    std::string suite;
    std::vector<std::string> managed; // relative to dir
    std::vector<std::string> native;
    std::string taint;
    std::optional<bool> leak;
    std::vector<std::string> expect_entries;  // "<method> => <module:function>"
    std::vector<std::string> expect_exits;    // "<module:function> => <method>"
    std::vector<std::string> expect_newly_reachable;
};

[[nodiscard]] CaseSpec load_case(const std::filesystem::path &dir);

struct Inputs
{
    managed::ManagedProgram program;
    std::vector<native::NativeModule> modules;
    std::optional<taint::TaintConfig> taint;
};

/// Parses and validates the given files. Source positions use the paths as
/// given, so relative paths keep artifacts independent of the checkout.
[[nodiscard]] Inputs load_inputs(const std::vector<std::filesystem::path> &managed_files,
                                 const std::vector<std::filesystem::path> &native_files,
                                 const std::optional<std::filesystem::path> &taint_file,
                                 const std::filesystem::path &base_dir = {});
[[nodiscard]] Inputs load_case_inputs(const CaseSpec &c);

struct PipelineResult
{
    bridge::BindingSet bindings;
    unigraph::MergeResult merged;
    stubgen::InjectResult stubs;
    std::optional<taint::TaintResult> findings;
    std::optional<taint::TaintResult> baseline; // same analysis without stubs
    std::map<std::string, std::string> artifacts; // file name -> content
};

[[nodiscard]] PipelineResult run_pipeline(const Inputs &in, const RunConfig &cfg);

/// Writes every artifact into `dir`. Files are staged under temporary names
/// and renamed; on failure the staged and renamed files are removed.
void write_artifacts(const PipelineResult &r, const std::filesystem::path &dir);

/// `<method> => <module:function>` strings for the found entries, and
/// `<module:function> => <method>` strings for the found exits.
[[nodiscard]] std::vector<std::string> entry_strings(const bridge::BindingSet &b);
[[nodiscard]] std::vector<std::string> exit_strings(const bridge::BindingSet &b);

} // namespace crosslink::pipeline
