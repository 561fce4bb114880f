#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "crosslink/bridge/symvalue.hpp"
#include "crosslink/native/module.hpp"

namespace crosslink::bridge {

/// Deterministic exploration limits. Paths are counted per explored root
/// function; depth counts active native frames.
struct ExecBudget
{
    std::size_t max_paths = 256;
    std::size_t max_depth = 16;
    std::size_t max_instructions = 10000;
    std::size_t loop_unroll = 2;
};

enum class UnresolvedReason
{
    non_constant_method_name,
    non_constant_class,
    non_constant_signature,
    path_budget_exhausted,
    depth_budget_exhausted,
    unresolved_target,
};

[[nodiscard]] const char *to_string(UnresolvedReason r);

/// One instruction of one native function.
struct InstrSite
{
    std::string module;
    std::string function;
    std::size_t index = 0;
    SourcePos pos;

    auto operator<=>(const InstrSite &o) const
    {
        return std::tie(module, function, index) <=> std::tie(o.module, o.function, o.index);
    }
    bool operator==(const InstrSite &o) const
    {
        return module == o.module && function == o.function && index == o.index;
    }
};

struct UnresolvedEvent
{
    InstrSite site;
    UnresolvedReason reason = UnresolvedReason::path_budget_exhausted;
    std::string detail;
};

/// A Call<Type>Method / CallStatic<Type>Method reached on some path.
struct MethodCallEvent
{
    InstrSite site;
    std::vector<std::string> call_stack; // outermost first; back() issued the call
    SymValue method;                     // the method-id operand
    native::Intrinsic intrinsic = native::Intrinsic::CallVoidMethod;
};

struct RegistrationRow
{
    std::size_t row = 0;
    SymValue name;
    SymValue signature;
    SymValue function;
};

/// A RegisterNatives reached on some path.
struct RegistrationEvent
{
    InstrSite site;
    SymValue clazz;
    std::vector<RegistrationRow> rows;
};

struct Exploration
{
    std::vector<MethodCallEvent> calls;
    std::vector<RegistrationEvent> registrations;
    std::vector<UnresolvedEvent> budget_events;
    std::size_t completed_paths = 0;
};

/// Path-by-path symbolic interpreter over one native module. Branches on
/// non-constant values fork; backward jumps are taken at most
/// `loop_unroll` times per frame and havoc every register written inside the
/// loop region, so loop-carried values never fold to constants.
class SymbolicExecutor
{
public:
    SymbolicExecutor(const native::NativeModule &module, ExecBudget budget);

    [[nodiscard]] Exploration explore(std::string_view function, const std::vector<SymValue> &args) const;

private:
    const native::NativeModule &module_;
    ExecBudget budget_;
};

} // namespace crosslink::bridge
