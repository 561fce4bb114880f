#include "crosslink/bridge/bindings.hpp"

#include <cstdio>
#include <future>
#include <map>
#include <set>

namespace crosslink::bridge {

using managed::ManagedMethod;
using managed::ManagedProgram;
using managed::MethodId;
using native::NativeModule;

namespace {

void append_unit(std::string &out, unsigned unit)
{
    char buf[8];
    std::snprintf(buf, sizeof buf, "_0%04x", unit & 0xffffu);
    out += buf;
}

// Decodes one UTF-8 sequence; malformed bytes are taken as Latin-1.
unsigned decode_utf8(std::string_view s, std::size_t &i)
{
    auto b = static_cast<unsigned char>(s[i]);
    int extra = b >= 0xf0 ? 3 : b >= 0xe0 ? 2 : b >= 0xc0 ? 1 : 0;
    if (extra == 0 || i + extra >= s.size())
    {
        ++i;
        return b;
    }
    unsigned cp = b & (0x3fu >> extra);
    for (int k = 1; k <= extra; ++k)
    {
        auto c = static_cast<unsigned char>(s[i + k]);
        if ((c & 0xc0) != 0x80)
        {
            ++i;
            return b;
        }
        cp = (cp << 6) | (c & 0x3f);
    }
    i += extra + 1;
    return cp;
}

} // namespace

std::string jni_escape(std::string_view text)
{
    std::string out;
    for (std::size_t i = 0; i < text.size();)
    {
        char c = text[i];
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'))
            out += c;
        else if (c == '.' || c == '/')
            out += '_';
        else if (c == '_')
            out += "_1";
        else if (c == ';')
            out += "_2";
        else if (c == '[')
            out += "_3";
        else if (static_cast<unsigned char>(c) < 0x80)
            append_unit(out, static_cast<unsigned char>(c));
        else
        {
            unsigned cp = decode_utf8(text, i);
            if (cp > 0xffff)
            {
                cp -= 0x10000;
                append_unit(out, 0xd800 + (cp >> 10));
                append_unit(out, 0xdc00 + (cp & 0x3ff));
            }
            else
                append_unit(out, cp);
            continue;
        }
        ++i;
    }
    return out;
}

std::string mangle_jni(const MethodId &m)
{
    return "Java_" + jni_escape(m.class_name) + "_" + jni_escape(m.method_name);
}

const char *to_string(BindingMode m)
{
    return m == BindingMode::static_registration ? "static" : "dynamic";
}

namespace {

// Native methods sharing (class, name) cannot be told apart by short names
// or by our registration matching; they are reported and left unbound.
std::set<MethodId> overloaded_natives(const ManagedProgram &p, std::vector<Diagnostic> *diags)
{
    std::map<std::pair<std::string, std::string>, std::vector<MethodId>> groups;
    for (const auto &m : managed::list_native_methods(p))
        groups[{m.class_name, m.method_name}].push_back(m);
    std::set<MethodId> out;
    for (const auto &[key, ids] : groups)
    {
        if (ids.size() < 2)
            continue;
        for (const auto &id : ids)
            out.insert(id);
        if (diags)
            diags->push_back({Severity::error, "overloaded-native",
                              "overloaded native method " + key.first + "." + key.second + " is not supported",
                              p.find_method(ids.front())->pos});
    }
    return out;
}

} // namespace

StaticDiscovery discover_static_bindings(const ManagedProgram &p, std::span<const NativeModule> modules)
{
    StaticDiscovery out;
    std::set<MethodId> skip = overloaded_natives(p, &out.diagnostics);
    for (const auto &m : managed::list_native_methods(p))
    {
        if (skip.count(m))
            continue;
        std::string symbol = mangle_jni(m);
        const NativeModule *owner = nullptr;
        for (const auto &mod : modules)
        {
            const native::NativeFunction *fn = mod.find_function(symbol);
            if (!fn || !fn->is_exported)
                continue;
            if (!owner)
            {
                owner = &mod;
                out.entries.push_back({m, {mod.name, symbol}, BindingMode::static_registration, fn->pos});
            }
            else
                out.diagnostics.push_back({Severity::warning, "duplicate-export",
                                           "symbol " + symbol + " is also exported by module '" + mod.name +
                                               "'; using module '" + owner->name + "'",
                                           fn->pos});
        }
    }
    return out;
}

DynamicDiscovery discover_dynamic_bindings(const ManagedProgram &p, const NativeModule &module,
                                           const ExecBudget &budget)
{
    DynamicDiscovery out;
    if (!module.find_function("JNI_OnLoad"))
        return out;
    std::set<MethodId> skip = overloaded_natives(p, nullptr);
    SymbolicExecutor exec(module, budget);
    const auto *onload = module.find_function("JNI_OnLoad");
    Exploration ex = exec.explore("JNI_OnLoad", std::vector<SymValue>(onload->params.size()));
    out.unresolved = ex.budget_events;

    std::set<std::pair<InstrSite, UnresolvedReason>> seen_unresolved;
    auto unresolved = [&](const InstrSite &s, UnresolvedReason r, std::string detail) {
        if (seen_unresolved.insert({s, r}).second)
            out.unresolved.push_back({s, r, std::move(detail)});
    };
    std::set<std::pair<MethodId, std::string>> seen;

    for (const auto &ev : ex.registrations)
    {
        if (ev.clazz.kind != SymValue::Kind::class_handle || !ev.clazz.class_name)
        {
            unresolved(ev.site, UnresolvedReason::non_constant_class, "RegisterNatives class " + ev.clazz.render());
            continue;
        }
        std::string cls = managed::internal_to_class(*ev.clazz.class_name);
        for (const auto &row : ev.rows)
        {
            std::string where = "RegisterNatives row " + std::to_string(row.row);
            if (!row.name.is_string())
            {
                unresolved(ev.site, UnresolvedReason::non_constant_method_name, where + " name " + row.name.render());
                continue;
            }
            if (!row.signature.is_string())
            {
                unresolved(ev.site, UnresolvedReason::non_constant_signature,
                           where + " signature " + row.signature.render());
                continue;
            }
            if (row.function.kind != SymValue::Kind::function_ref)
            {
                unresolved(ev.site, UnresolvedReason::unresolved_target, where + " function " + row.function.render());
                continue;
            }
            const ManagedMethod *m = p.find_by_descriptor(cls, row.name.text, row.signature.text);
            if (!m || !m->is_native || skip.count(m->id))
            {
                out.diagnostics.push_back({Severity::warning, "registration-mismatch",
                                           where + " (" + cls + "." + row.name.text + row.signature.text +
                                               ") matches no native method",
                                           ev.site.pos});
                continue;
            }
            if (!seen.insert({m->id, row.function.text}).second)
                continue;
            out.entries.push_back({m->id,
                                   {module.name, row.function.text},
                                   BindingMode::dynamic_registration,
                                   module.find_function(row.function.text)->pos});
        }
    }
    return out;
}

std::vector<SymValue> seed_arguments(const ManagedMethod &m)
{
    auto value_for = [](const managed::TypeName &t) {
        if (t == "object")
            return SymValue::object_handle(std::string("java/lang/Object"));
        if (!managed::is_builtin_type(t))
            return SymValue::object_handle(managed::class_to_internal(t));
        return SymValue::unknown();
    };
    std::vector<SymValue> args;
    args.push_back(SymValue::unknown());
    std::string self = managed::class_to_internal(m.id.class_name);
    args.push_back(m.is_static ? SymValue::class_handle(self) : SymValue::object_handle(self));
    for (const auto &t : m.id.param_types)
        args.push_back(value_for(t));
    return args;
}

ExitExtraction extract_exit_invocations(const ManagedProgram &p, const NativeModule &module,
                                        std::span<const EntryBinding> entries, const ExecBudget &budget)
{
    ExitExtraction out;
    out.relation.resize(entries.size());
    SymbolicExecutor exec(module, budget);
    std::map<std::tuple<std::string, std::size_t, MethodId>, std::size_t> index_of;
    std::set<std::pair<InstrSite, UnresolvedReason>> seen_unresolved;
    auto unresolved = [&](const UnresolvedEvent &e) {
        if (seen_unresolved.insert({e.site, e.reason}).second)
            out.unresolved.push_back(e);
    };

    for (std::size_t i = 0; i < entries.size(); ++i)
    {
        const EntryBinding &entry = entries[i];
        if (entry.native_fn.module != module.name)
            continue;
        const ManagedMethod *m = p.find_method(entry.method);
        if (!m)
            throw AnalysisError("entry binding refers to unknown method " + entry.method.canonical());
        Exploration ex = exec.explore(entry.native_fn.function, seed_arguments(*m));
        for (const auto &e : ex.budget_events)
            unresolved(e);
        std::set<std::size_t> row;
        for (const auto &call : ex.calls)
        {
            const SymValue &h = call.method;
            std::string detail = "call " + h.render();
            if (!h.method_name)
            {
                unresolved({call.site, UnresolvedReason::non_constant_method_name, detail});
                continue;
            }
            if (!h.class_name)
            {
                unresolved({call.site, UnresolvedReason::non_constant_class, detail});
                continue;
            }
            if (!h.signature)
            {
                unresolved({call.site, UnresolvedReason::non_constant_signature, detail});
                continue;
            }
            const ManagedMethod *target =
                p.find_by_descriptor(managed::internal_to_class(*h.class_name), *h.method_name, *h.signature);
            if (!target)
            {
                unresolved({call.site, UnresolvedReason::unresolved_target, detail + " has no managed definition"});
                continue;
            }
            auto key = std::make_tuple(call.site.function, call.site.index, target->id);
            auto it = index_of.find(key);
            if (it == index_of.end())
            {
                it = index_of.emplace(key, out.exits.size()).first;
                out.exits.push_back({{module.name, call.site.function},
                                     target->id,
                                     native::is_static_method_call(call.intrinsic),
                                     call.site.index,
                                     call.site.pos,
                                     call.call_stack});
            }
            row.insert(it->second);
        }
        out.relation[i].assign(row.begin(), row.end());
    }
    return out;
}

BindingSet discover_bindings(const ManagedProgram &p, std::span<const NativeModule> modules,
                             const ExecBudget &budget)
{
    BindingSet out;
    StaticDiscovery st = discover_static_bindings(p, modules);
    out.diagnostics = st.diagnostics;

    std::vector<std::future<DynamicDiscovery>> dyn_jobs;
    for (const auto &mod : modules)
        dyn_jobs.push_back(std::async(std::launch::async,
                                      [&p, &mod, &budget] { return discover_dynamic_bindings(p, mod, budget); }));

    std::map<MethodId, EntryBinding> by_method;
    for (const auto &e : st.entries)
        by_method.emplace(e.method, e);
    std::set<MethodId> dynamic_seen;
    for (auto &job : dyn_jobs)
    {
        DynamicDiscovery d = job.get();
        out.unresolved.insert(out.unresolved.end(), d.unresolved.begin(), d.unresolved.end());
        out.diagnostics.insert(out.diagnostics.end(), d.diagnostics.begin(), d.diagnostics.end());
        for (const auto &e : d.entries)
        {
            auto it = by_method.find(e.method);
            if (it == by_method.end())
            {
                by_method.emplace(e.method, e);
                dynamic_seen.insert(e.method);
            }
            else if (!dynamic_seen.count(e.method))
            {
                out.diagnostics.push_back({Severity::warning, "dynamic-override",
                                           "dynamic registration of " + e.method.short_name() + " to " +
                                               e.native_fn.node_id() + " overrides static binding to " +
                                               it->second.native_fn.node_id(),
                                           e.native_pos});
                it->second = e;
                dynamic_seen.insert(e.method);
            }
            else if (it->second.native_fn != e.native_fn)
                out.diagnostics.push_back({Severity::warning, "duplicate-registration",
                                           e.method.short_name() + " is registered to both " +
                                               it->second.native_fn.node_id() + " and " + e.native_fn.node_id() +
                                               "; keeping the first",
                                           e.native_pos});
        }
    }
    for (auto &[id, e] : by_method)
        out.entries.push_back(e);

    std::map<NativeRef, std::vector<MethodId>> implementers;
    for (const auto &e : out.entries)
        implementers[e.native_fn].push_back(e.method);
    for (const auto &[fn, methods] : implementers)
        if (methods.size() > 1)
        {
            std::string names;
            for (const auto &m : methods)
                names += (names.empty() ? "" : ", ") + m.short_name();
            out.diagnostics.push_back({Severity::note, "shared-implementation",
                                       fn.node_id() + " implements several native methods: " + names, {}});
        }
    for (const auto &m : managed::list_native_methods(p))
        if (!by_method.count(m))
            out.diagnostics.push_back(
                {Severity::warning, "unbound-native", "no binding found for " + m.short_name(), p.find_method(m)->pos});

    std::vector<std::future<ExitExtraction>> exit_jobs;
    for (const auto &mod : modules)
        exit_jobs.push_back(std::async(std::launch::async, [&p, &mod, &out, &budget] {
            return extract_exit_invocations(p, mod, out.entries, budget);
        }));
    out.relation.resize(out.entries.size());
    for (auto &job : exit_jobs)
    {
        ExitExtraction x = job.get();
        std::size_t offset = out.exits.size();
        out.exits.insert(out.exits.end(), x.exits.begin(), x.exits.end());
        out.unresolved.insert(out.unresolved.end(), x.unresolved.begin(), x.unresolved.end());
        for (std::size_t i = 0; i < x.relation.size(); ++i)
            for (std::size_t idx : x.relation[i])
                out.relation[i].push_back(idx + offset);
    }
    return out;
}

} // namespace crosslink::bridge
