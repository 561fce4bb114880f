#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "crosslink/bridge/manifest.hpp"
#include "crosslink/managed/program.hpp"

namespace crosslink::taint {

/// Sources taint the result of the call; sinks are checked at the listed
/// argument positions (0-based, receiver excluded).
struct TaintConfig
{
    std::set<managed::MethodId> sources;
    std::map<managed::MethodId, std::set<std::size_t>> sinks;
};

/// Line format: `source <method>` or `sink:<pos>[,<pos>...] <method>`, with
/// methods in canonical form. `#` starts a comment.
[[nodiscard]] TaintConfig parse_taint_config(std::string_view text, const std::string &file = "<taint>");

/// A statement of a method. Negative indices denote parameters: -1 is
/// parameter 0, -2 parameter 1, and so on.
struct StmtSite
{
    managed::MethodId method;
    long index = 0;

    auto operator<=>(const StmtSite &) const = default;
    [[nodiscard]] std::string str() const;
};

enum class HopKind { source, assign, param, ret, result, sink };

[[nodiscard]] const char *to_string(HopKind k);

/// One propagation step: `local` in `site.method` obtained taint through the
/// statement at `site`. Param hops also record the call site they came in by.
struct Hop
{
    HopKind kind = HopKind::source;
    StmtSite site;
    std::string local;
    StmtSite via;
    std::size_t arg_pos = 0; // sink hops
};

struct Finding
{
    StmtSite source;
    StmtSite sink;
    std::size_t arg_pos = 0;
    std::vector<Hop> witness; // source hop first, sink hop last
    bool crosses_native = false;
};

struct TaintResult
{
    std::vector<Finding> findings; // sorted by (source, sink)
    std::set<managed::MethodId> scope;
    std::size_t iterations = 0;
};

/// Methods reachable from the program's entry points through invokes.
[[nodiscard]] std::set<managed::MethodId> invoke_reachable(const managed::ManagedProgram &p);

/// Forward interprocedural taint analysis over `scope` (all reachable
/// methods when empty). Flow-sensitive inside a method, one summary per
/// parameter and return value across methods.
[[nodiscard]] TaintResult taint_analyze(const managed::ManagedProgram &p, const TaintConfig &config,
                                        const std::set<managed::MethodId> &scope = {});

/// Re-checks every hop of a witness against the program text. Returns an
/// empty string when the witness is valid, otherwise the first problem.
[[nodiscard]] std::string check_witness(const managed::ManagedProgram &p, const TaintConfig &config,
                                        const Finding &f);

[[nodiscard]] Json findings_to_json(const TaintResult &r);
[[nodiscard]] std::string findings_table(const TaintResult &r);

inline constexpr const char *findings_schema = "crosslink.findings/1";

} // namespace crosslink::taint
