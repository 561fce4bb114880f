#include "crosslink/taint/taint.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>
#include <tuple>

#include "crosslink/support/lexer.hpp"

namespace crosslink::taint {

using managed::ManagedMethod;
using managed::ManagedProgram;
using managed::MethodId;
using managed::Statement;
using managed::StmtKind;

namespace {

constexpr std::string_view kNativeStubClass = "DummyBinaryClass";

std::vector<std::size_t> cfg_successors(const ManagedMethod &m, std::size_t i)
{
    const Statement &s = m.body[i];
    std::vector<std::size_t> out;
    switch (s.kind)
    {
    case StmtKind::ret: return out;
    case StmtKind::go_to: out.push_back(*m.label_index(s.label)); return out;
    case StmtKind::if_goto:
        if (i + 1 < m.body.size())
            out.push_back(i + 1);
        out.push_back(*m.label_index(s.label));
        return out;
    default:
        if (i + 1 < m.body.size())
            out.push_back(i + 1);
        return out;
    }
}

bool defines(const Statement &s, const std::string &local)
{
    switch (s.kind)
    {
    case StmtKind::assign_const:
    case StmtKind::assign_local:
    case StmtKind::binop:
    case StmtKind::new_instance:
    case StmtKind::invoke: return s.dst == local;
    default: return false;
    }
}

} // namespace

TaintConfig parse_taint_config(std::string_view text, const std::string &file)
{
    TaintConfig cfg;
    auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i)
    {
        std::string line(lines[i]);
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream is(line);
        std::string kind, method;
        if (!(is >> kind))
            continue;
        SourcePos pos{file, static_cast<int>(i) + 1, 1};
        if (!(is >> method))
            throw InputError(pos, "expected a method after '" + kind + "'");
        std::string extra;
        if (is >> extra)
            throw InputError(pos, "unexpected '" + extra + "' after method");
        MethodId id = MethodId::parse(method, pos);
        if (kind == "source")
        {
            cfg.sources.insert(id);
            continue;
        }
        if (kind.rfind("sink:", 0) != 0)
            throw InputError(pos, "expected 'source' or 'sink:<positions>', found '" + kind + "'");
        std::string list = kind.substr(5);
        std::set<std::size_t> positions;
        std::istringstream ls(list);
        std::string item;
        while (std::getline(ls, item, ','))
        {
            if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
                throw InputError(pos, "malformed sink position '" + item + "'");
            std::size_t p = std::stoul(item);
            if (p >= id.param_types.size())
                throw InputError(pos, "sink position " + item + " out of range for " + id.short_name());
            positions.insert(p);
        }
        if (positions.empty())
            throw InputError(pos, "sink needs at least one argument position");
        cfg.sinks[id].insert(positions.begin(), positions.end());
    }
    return cfg;
}

std::string StmtSite::str() const
{
    return method.short_name() + (index < 0 ? "#param" + std::to_string(-1 - index) : "@" + std::to_string(index));
}

const char *to_string(HopKind k)
{
    switch (k)
    {
    case HopKind::source: return "source";
    case HopKind::assign: return "assign";
    case HopKind::param: return "param";
    case HopKind::ret: return "return";
    case HopKind::result: return "result";
    case HopKind::sink: return "sink";
    }
    return "?";
}

std::set<MethodId> invoke_reachable(const ManagedProgram &p)
{
    std::set<MethodId> seen;
    std::deque<MethodId> queue;
    for (const auto &ep : p.entry_points)
        if (seen.insert(ep).second)
            queue.push_back(ep);
    while (!queue.empty())
    {
        MethodId id = std::move(queue.front());
        queue.pop_front();
        const ManagedMethod *m = p.find_method(id);
        if (!m)
            continue;
        for (const auto &s : m->body)
            if (s.kind == StmtKind::invoke && seen.insert(s.callee).second)
                queue.push_back(s.callee);
    }
    return seen;
}

namespace {

struct Label
{
    Hop hop;
    int parent = -1;
    StmtSite source;
};

using State = std::map<std::string, int>; // tainted local -> label

class Analysis
{
public:
    Analysis(const ManagedProgram &p, const TaintConfig &c) : p_(p), cfg_(c) {}

    TaintResult run(const std::set<MethodId> &scope)
    {
        TaintResult out;
        out.scope = scope;
        std::vector<const ManagedMethod *> methods;
        for (const auto &id : scope)
            if (const ManagedMethod *m = p_.find_method(id); m && m->has_body())
                methods.push_back(m);
        do
        {
            changed_ = false;
            ++out.iterations;
            for (const auto *m : methods)
                analyze(*m);
        } while (changed_);
        for (auto &[key, f] : findings_)
            out.findings.push_back(std::move(f));
        return out;
    }

private:
    int label(HopKind kind, StmtSite site, const std::string &local, int parent, StmtSite via = {})
    {
        auto key = std::make_tuple(kind, site, local, parent, via);
        if (auto it = memo_.find(key); it != memo_.end())
            return it->second;
        Label l;
        l.hop.kind = kind;
        l.hop.site = site;
        l.hop.local = local;
        l.hop.via = via;
        l.parent = parent;
        l.source = parent < 0 ? site : labels_[parent].source;
        labels_.push_back(std::move(l));
        int id = static_cast<int>(labels_.size()) - 1;
        memo_.emplace(key, id);
        return id;
    }

    static void set_first(std::map<std::size_t, int> &summary, std::size_t key, int l, bool &changed)
    {
        if (summary.emplace(key, l).second)
            changed = true;
    }

    void record_finding(const StmtSite &sink, std::size_t pos, const std::string &local, int l)
    {
        auto key = std::make_pair(labels_[l].source, sink);
        if (findings_.count(key))
            return;
        Finding f;
        f.source = labels_[l].source;
        f.sink = sink;
        f.arg_pos = pos;
        std::vector<Hop> chain;
        for (int cur = l; cur >= 0; cur = labels_[cur].parent)
            chain.push_back(labels_[cur].hop);
        f.witness.assign(chain.rbegin(), chain.rend());
        Hop sink_hop;
        sink_hop.kind = HopKind::sink;
        sink_hop.site = sink;
        sink_hop.local = local;
        sink_hop.arg_pos = pos;
        f.witness.push_back(sink_hop);
        for (const auto &h : f.witness)
            f.crosses_native = f.crosses_native || h.site.method.class_name == kNativeStubClass;
        findings_.emplace(key, std::move(f));
    }

    void transfer(const ManagedMethod &m, std::size_t i, State &t)
    {
        const Statement &s = m.body[i];
        StmtSite here{m.id, static_cast<long>(i)};
        auto taint_of = [&](const std::string &local) {
            auto it = t.find(local);
            return it == t.end() ? -1 : it->second;
        };
        switch (s.kind)
        {
        case StmtKind::assign_const:
        case StmtKind::new_instance: t.erase(s.dst); break;
        case StmtKind::assign_local:
        case StmtKind::binop: {
            int from = taint_of(s.src);
            if (from < 0 && s.kind == StmtKind::binop)
                from = taint_of(s.src2);
            if (from < 0)
                t.erase(s.dst);
            else
                t[s.dst] = label(HopKind::assign, here, s.dst, from);
            break;
        }
        case StmtKind::invoke: {
            int result = -1;
            if (cfg_.sources.count(s.callee))
            {
                if (!s.dst.empty())
                    result = label(HopKind::source, here, s.dst, -1);
            }
            else if (auto sk = cfg_.sinks.find(s.callee); sk != cfg_.sinks.end())
            {
                for (std::size_t pos : sk->second)
                    if (pos < s.args.size())
                        if (int l = taint_of(s.args[pos]); l >= 0)
                            record_finding(here, pos, s.args[pos], l);
            }
            else if (const ManagedMethod *callee = p_.find_method(s.callee); callee && callee->has_body())
            {
                auto &params = param_summary_[s.callee];
                for (std::size_t a = 0; a < s.args.size(); ++a)
                    if (int l = taint_of(s.args[a]); l >= 0)
                        set_first(params, a,
                                  label(HopKind::param, {s.callee, -1 - static_cast<long>(a)}, callee->param_names[a],
                                        l, here),
                                  changed_);
                if (auto r = return_summary_.find(s.callee); r != return_summary_.end() && !s.dst.empty())
                    result = label(HopKind::result, here, s.dst, r->second);
            }
            if (!s.dst.empty())
            {
                if (result >= 0)
                    t[s.dst] = result;
                else
                    t.erase(s.dst);
            }
            break;
        }
        case StmtKind::ret:
            if (!s.src.empty())
                if (int l = taint_of(s.src); l >= 0)
                    if (return_summary_.emplace(m.id, label(HopKind::ret, here, s.src, l)).second)
                        changed_ = true;
            break;
        default: break;
        }
    }

    void analyze(const ManagedMethod &m)
    {
        if (m.body.empty())
            return;
        std::vector<State> in(m.body.size());
        std::vector<bool> visited(m.body.size(), false);
        if (auto it = param_summary_.find(m.id); it != param_summary_.end())
            for (const auto &[idx, l] : it->second)
                in[0].emplace(m.param_names[idx], l);
        std::deque<std::size_t> work{0};
        visited[0] = true;
        while (!work.empty())
        {
            std::size_t i = work.front();
            work.pop_front();
            State t = in[i];
            transfer(m, i, t);
            for (std::size_t succ : cfg_successors(m, i))
            {
                bool grew = !visited[succ];
                visited[succ] = true;
                for (const auto &[local, l] : t)
                    grew = in[succ].emplace(local, l).second || grew;
                if (grew)
                    work.push_back(succ);
            }
        }
    }

    const ManagedProgram &p_;
    const TaintConfig &cfg_;
    std::vector<Label> labels_;
    std::map<std::tuple<HopKind, StmtSite, std::string, int, StmtSite>, int> memo_;
    std::map<MethodId, std::map<std::size_t, int>> param_summary_;
    std::map<MethodId, int> return_summary_;
    std::map<std::pair<StmtSite, StmtSite>, Finding> findings_;
    bool changed_ = false;
};

} // namespace

TaintResult taint_analyze(const ManagedProgram &p, const TaintConfig &config, const std::set<MethodId> &scope)
{
    Analysis a(p, config);
    return a.run(scope.empty() ? invoke_reachable(p) : scope);
}

namespace {

// Is there a CFG path from just after `def` (method entry when negative) to
// statement `use` along which `local` is not redefined?
bool def_clear(const ManagedMethod &m, long def, std::size_t use, const std::string &local)
{
    std::vector<std::size_t> start;
    if (def < 0)
        start.push_back(0);
    else
        start = cfg_successors(m, static_cast<std::size_t>(def));
    std::set<std::size_t> seen;
    std::deque<std::size_t> queue;
    for (std::size_t s : start)
        if (seen.insert(s).second)
            queue.push_back(s);
    while (!queue.empty())
    {
        std::size_t n = queue.front();
        queue.pop_front();
        if (n == use)
            return true;
        if (defines(m.body[n], local))
            continue;
        for (std::size_t s : cfg_successors(m, n))
            if (seen.insert(s).second)
                queue.push_back(s);
    }
    return false;
}

const Statement *stmt_at(const ManagedProgram &p, const StmtSite &s)
{
    const ManagedMethod *m = p.find_method(s.method);
    if (!m || s.index < 0 || static_cast<std::size_t>(s.index) >= m->body.size())
        return nullptr;
    return &m->body[s.index];
}

} // namespace

std::string check_witness(const ManagedProgram &p, const TaintConfig &config, const Finding &f)
{
    const auto &w = f.witness;
    if (w.size() < 2)
        return "witness too short";
    if (w.front().kind != HopKind::source || w.back().kind != HopKind::sink)
        return "witness must run from a source hop to a sink hop";
    for (std::size_t i = 0; i < w.size(); ++i)
    {
        const Hop &h = w[i];
        std::string where = "hop " + std::to_string(i) + " (" + to_string(h.kind) + " " + h.site.str() + "): ";
        const Statement *s = stmt_at(p, h.site);
        const ManagedMethod *m = p.find_method(h.site.method);
        if (!m)
            return where + "unknown method";
        if (i == 0)
        {
            if (!s || s->kind != StmtKind::invoke || !config.sources.count(s->callee) || s->dst != h.local)
                return where + "not a source call defining " + h.local;
            if (!(h.site == f.source))
                return where + "does not match the finding's source";
            continue;
        }
        const Hop &prev = w[i - 1];
        bool same_method = prev.site.method == h.site.method;
        switch (h.kind)
        {
        case HopKind::source: return where + "source hop inside the chain";
        case HopKind::assign:
            if (!same_method || !s ||
                !((s->kind == StmtKind::assign_local && s->src == prev.local) ||
                  (s->kind == StmtKind::binop && (s->src == prev.local || s->src2 == prev.local))) ||
                s->dst != h.local)
                return where + "not an assignment from " + prev.local;
            if (!def_clear(*m, prev.site.index, h.site.index, prev.local))
                return where + prev.local + " is redefined before use";
            break;
        case HopKind::param: {
            if (h.site.index >= 0)
                return where + "param hop must name a parameter";
            std::size_t idx = static_cast<std::size_t>(-1 - h.site.index);
            if (idx >= m->param_names.size() || m->param_names[idx] != h.local)
                return where + "no parameter " + h.local;
            const Statement *call = stmt_at(p, h.via);
            if (!call || !(h.via.method == prev.site.method) || call->kind != StmtKind::invoke ||
                !(call->callee == h.site.method) || idx >= call->args.size() || call->args[idx] != prev.local)
                return where + "call site does not pass " + prev.local;
            const ManagedMethod *caller = p.find_method(prev.site.method);
            if (!def_clear(*caller, prev.site.index, h.via.index, prev.local))
                return where + prev.local + " is redefined before the call";
            break;
        }
        case HopKind::ret:
            if (!same_method || !s || s->kind != StmtKind::ret || s->src != prev.local || h.local != prev.local)
                return where + "does not return " + prev.local;
            if (!def_clear(*m, prev.site.index, h.site.index, prev.local))
                return where + prev.local + " is redefined before return";
            break;
        case HopKind::result:
            if (prev.kind != HopKind::ret || !s || s->kind != StmtKind::invoke ||
                !(s->callee == prev.site.method) || s->dst != h.local)
                return where + "not a call receiving the result of " + prev.site.method.short_name();
            break;
        case HopKind::sink: {
            if (i + 1 != w.size())
                return where + "sink hop before the end";
            auto sk = s && s->kind == StmtKind::invoke ? config.sinks.find(s->callee) : config.sinks.end();
            if (sk == config.sinks.end() || !sk->second.count(h.arg_pos) || h.arg_pos >= s->args.size() ||
                s->args[h.arg_pos] != prev.local || !same_method)
                return where + "not a sink receiving " + prev.local;
            if (!def_clear(*m, prev.site.index, h.site.index, prev.local))
                return where + prev.local + " is redefined before the sink";
            if (!(h.site == f.sink))
                return where + "does not match the finding's sink";
            break;
        }
        }
    }
    return {};
}

Json findings_to_json(const TaintResult &r)
{
    Json findings = Json::array();
    for (const auto &f : r.findings)
    {
        Json witness = Json::array();
        for (const auto &h : f.witness)
        {
            Json hop{{"kind", to_string(h.kind)}, {"method", h.site.method.canonical()}, {"index", h.site.index},
                     {"local", h.local}};
            if (h.kind == HopKind::param)
                hop["via"] = h.via.str();
            if (h.kind == HopKind::sink)
                hop["arg"] = h.arg_pos;
            witness.push_back(std::move(hop));
        }
        findings.push_back({{"source", f.source.str()},
                            {"sink", f.sink.str()},
                            {"arg", f.arg_pos},
                            {"crosses_native", f.crosses_native},
                            {"witness", std::move(witness)}});
    }
    return Json{{"schema", findings_schema},
                {"scope_size", r.scope.size()},
                {"iterations", r.iterations},
                {"findings", std::move(findings)}};
}

std::string findings_table(const TaintResult &r)
{
    std::vector<std::array<std::string, 5>> rows;
    rows.push_back({"#", "source", "sink", "native", "hops"});
    for (std::size_t i = 0; i < r.findings.size(); ++i)
    {
        const auto &f = r.findings[i];
        rows.push_back({std::to_string(i + 1), f.source.str(), f.sink.str() + " arg " + std::to_string(f.arg_pos),
                        f.crosses_native ? "yes" : "no", std::to_string(f.witness.size())});
    }
    std::array<std::size_t, 5> width{};
    for (const auto &row : rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());
    std::ostringstream os;
    for (const auto &row : rows)
    {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            os << row[c];
            if (c + 1 < row.size())
                os << std::string(width[c] - row[c].size() + 2, ' ');
        }
        os << "\n";
    }
    if (r.findings.empty())
        os << "no findings\n";
    return os.str();
}

} // namespace crosslink::taint
