#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "crosslink/bridge/executor.hpp"
#include "crosslink/managed/program.hpp"
#include "crosslink/native/module.hpp"

namespace crosslink::bridge {

/// JNI short name for a native method: `Java_` + escaped class + `_` +
/// escaped method. `_` -> `_1`, `;` -> `_2`, `[` -> `_3`, package
/// separators -> `_`, other non-alphanumerics -> `_0xxxx`.
[[nodiscard]] std::string mangle_jni(const managed::MethodId &m);
[[nodiscard]] std::string jni_escape(std::string_view text);

struct NativeRef
{
    std::string module;
    std::string function;

    [[nodiscard]] std::string node_id() const { return module + ":" + function; }
    auto operator<=>(const NativeRef &) const = default;
};

enum class BindingMode { static_registration, dynamic_registration };

[[nodiscard]] const char *to_string(BindingMode m);

/// Entry invocation: a native-flagged managed method bound to the native
/// function that implements it.
struct EntryBinding
{
    managed::MethodId method;
    NativeRef native_fn;
    BindingMode mode = BindingMode::static_registration;
    SourcePos native_pos;
};

/// Exit invocation: a native instruction that calls back into a managed
/// method. `in_function` is the innermost active native function.
struct ExitInvocation
{
    NativeRef in_function;
    managed::MethodId target;
    bool is_static = false;
    std::size_t instr_index = 0;
    SourcePos pos;
    std::vector<std::string> call_stack; // first path that reached the call
};

struct BindingSet
{
    std::vector<EntryBinding> entries;
    std::vector<ExitInvocation> exits;
    /// relation[i]: indices into `exits` reachable from entries[i], sorted.
    std::vector<std::vector<std::size_t>> relation;
    std::vector<UnresolvedEvent> unresolved;
    std::vector<Diagnostic> diagnostics;
};

struct StaticDiscovery
{
    std::vector<EntryBinding> entries;
    std::vector<Diagnostic> diagnostics;
};

/// Matches mangled names against exported symbols. Modules are searched in
/// the given order; the first module exporting a name wins.
[[nodiscard]] StaticDiscovery discover_static_bindings(const managed::ManagedProgram &p,
                                                       std::span<const native::NativeModule> modules);

struct DynamicDiscovery
{
    std::vector<EntryBinding> entries;
    std::vector<UnresolvedEvent> unresolved;
    std::vector<Diagnostic> diagnostics;
};

/// Explores the module's JNI_OnLoad (if any) and resolves each
/// RegisterNatives row to a native-flagged method.
[[nodiscard]] DynamicDiscovery discover_dynamic_bindings(const managed::ManagedProgram &p,
                                                         const native::NativeModule &module,
                                                         const ExecBudget &budget);

struct ExitExtraction
{
    std::vector<ExitInvocation> exits;           // deduplicated by (function, index, target)
    std::vector<std::vector<std::size_t>> relation; // parallel to the entries argument
    std::vector<UnresolvedEvent> unresolved;
};

/// Explores every entry bound into `module` and collects its exits. Entries
/// bound elsewhere get an empty relation row.
[[nodiscard]] ExitExtraction extract_exit_invocations(const managed::ManagedProgram &p,
                                                      const native::NativeModule &module,
                                                      std::span<const EntryBinding> entries,
                                                      const ExecBudget &budget);

/// Initial register contents for an entry function: env, receiver or class,
/// then one value per managed parameter.
[[nodiscard]] std::vector<SymValue> seed_arguments(const managed::ManagedMethod &m);

/// Full discovery: static, then dynamic (overriding), then exits.
[[nodiscard]] BindingSet discover_bindings(const managed::ManagedProgram &p,
                                           std::span<const native::NativeModule> modules, const ExecBudget &budget);

} // namespace crosslink::bridge
