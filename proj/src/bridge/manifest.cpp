#include "crosslink/bridge/manifest.hpp"

namespace crosslink {

Json pos_to_json(const SourcePos &pos)
{
    if (pos.line == 0)
        return nullptr;
    return Json{{"file", pos.file}, {"line", pos.line}, {"column", pos.column}};
}

Json diagnostics_to_json(const std::vector<Diagnostic> &diags)
{
    Json out = Json::array();
    for (const auto &d : diags)
        out.push_back({{"severity", to_string(d.severity)},
                       {"code", d.code},
                       {"message", d.message},
                       {"pos", pos_to_json(d.pos)}});
    return out;
}

} // namespace crosslink

namespace crosslink::bridge {

Json bindings_to_json(const BindingSet &b)
{
    Json entries = Json::array();
    for (std::size_t i = 0; i < b.entries.size(); ++i)
    {
        const auto &e = b.entries[i];
        entries.push_back({{"id", i},
                           {"method", e.method.canonical()},
                           {"native", e.native_fn.node_id()},
                           {"mode", to_string(e.mode)},
                           {"exits", i < b.relation.size() ? Json(b.relation[i]) : Json::array()}});
    }
    Json exits = Json::array();
    for (std::size_t i = 0; i < b.exits.size(); ++i)
    {
        const auto &x = b.exits[i];
        exits.push_back({{"id", i},
                         {"in_function", x.in_function.node_id()},
                         {"target", x.target.canonical()},
                         {"static", x.is_static},
                         {"instr_index", x.instr_index},
                         {"pos", pos_to_json(x.pos)},
                         {"call_stack", x.call_stack}});
    }
    Json unresolved = Json::array();
    for (const auto &u : b.unresolved)
        unresolved.push_back({{"function", u.site.module + ":" + u.site.function},
                              {"instr_index", u.site.index},
                              {"reason", to_string(u.reason)},
                              {"detail", u.detail},
                              {"pos", pos_to_json(u.site.pos)}});
    return Json{{"schema", bindings_schema},
                {"entries", std::move(entries)},
                {"exits", std::move(exits)},
                {"unresolved", std::move(unresolved)},
                {"diagnostics", diagnostics_to_json(b.diagnostics)}};
}

} // namespace crosslink::bridge
