#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "crosslink/bridge/bindings.hpp"
#include "crosslink/bridge/manifest.hpp"
#include "crosslink/managed/program.hpp"

namespace crosslink::stubgen {

inline constexpr const char *stub_class = "DummyBinaryClass";
inline constexpr const char *opaque_field = "opaque";

struct StubOptions
{
    std::size_t perm_cap = 64;
};

struct StubTargetReport
{
    managed::MethodId target;
    std::size_t combinations = 0; // size of the full argument product
    bool cap_applied = false;
    std::vector<std::vector<std::string>> candidates; // per parameter, in tuple order
    std::vector<std::vector<std::string>> tuples; // emitted argument tuples, in order
};

struct StubReport
{
    managed::MethodId native_method;
    managed::MethodId stub;
    std::string native_fn; // module:function
    std::vector<StubTargetReport> targets;
};

struct StubBuild
{
    managed::ManagedMethod method;
    StubReport report;
};

/// Builds the static stub standing in for `native_method`: for each target,
/// a result local, a receiver for instance targets, one opaque-guarded call
/// per argument tuple, then opaque-guarded returns of every local of the
/// return type. Throws AnalysisError for targets on unknown classes.
[[nodiscard]] StubBuild synthesize_stub(const managed::ManagedProgram &p, const managed::ManagedMethod &native_method,
                                        const std::string &stub_name, std::span<const managed::MethodId> targets,
                                        const StubOptions &options);

/// Replaces each invoke of a key of `native_to_stub` by a static invoke of
/// its stub (receiver dropped, arguments kept). Returns the rewrite count.
std::size_t rewrite_call_sites(managed::ManagedProgram &p,
                               const std::map<managed::MethodId, managed::MethodId> &native_to_stub);

struct InjectResult
{
    managed::ManagedProgram program;
    std::vector<StubReport> stubs;
    std::size_t rewritten_sites = 0;
};

/// Adds the stub class with one stub per entry binding and rewrites call
/// sites. The result is re-validated.
[[nodiscard]] InjectResult inject_stubs(const managed::ManagedProgram &p, const bridge::BindingSet &bindings,
                                        const StubOptions &options);

[[nodiscard]] Json stubs_to_json(const InjectResult &r);

inline constexpr const char *stubs_schema = "crosslink.stubs/1";

} // namespace crosslink::stubgen
