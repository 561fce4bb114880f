#include "crosslink/bridge/executor.hpp"

#include <map>
#include <set>
#include <tuple>

namespace crosslink::bridge {

using native::Intrinsic;
using native::NativeFunction;
using native::NativeInstr;
using native::Opcode;
using native::Operand;

const char *to_string(UnresolvedReason r)
{
    switch (r)
    {
    case UnresolvedReason::non_constant_method_name: return "non-constant method name";
    case UnresolvedReason::non_constant_class: return "non-constant class";
    case UnresolvedReason::non_constant_signature: return "non-constant signature";
    case UnresolvedReason::path_budget_exhausted: return "path budget exhausted";
    case UnresolvedReason::depth_budget_exhausted: return "depth budget exhausted";
    case UnresolvedReason::unresolved_target: return "unresolved target";
    }
    return "?";
}

namespace {

struct Frame
{
    const NativeFunction *fn = nullptr;
    std::size_t pc = 0;
    std::map<std::string, SymValue> regs;
    std::string result_reg; // caller register receiving our return value
    std::map<std::size_t, std::size_t> back_edges; // jump index -> times taken
};

using CellKey = std::tuple<std::string, std::int64_t, std::int64_t>;

struct PathState
{
    std::vector<Frame> frames;
    std::map<CellKey, SymValue> cells;     // run-time table writes
    std::set<std::string> havoced_tables;  // tables written at an unknown index
    std::size_t steps = 0;
};

std::optional<std::string> return_class(const std::optional<std::string> &sig)
{
    if (!sig)
        return std::nullopt;
    auto close = sig->find(')');
    if (close == std::string::npos || close + 1 >= sig->size() || (*sig)[close + 1] != 'L' || sig->back() != ';')
        return std::nullopt;
    return sig->substr(close + 2, sig->size() - close - 3);
}

class Run
{
public:
    Run(const native::NativeModule &m, const ExecBudget &b, Exploration &out) : m_(m), b_(b), out_(out) {}

    void start(const NativeFunction &fn, const std::vector<SymValue> &args)
    {
        PathState init;
        init.frames.push_back(make_frame(fn, args));
        std::vector<PathState> work;
        work.push_back(std::move(init));
        started_ = 1;
        while (!work.empty())
        {
            PathState p = std::move(work.back());
            work.pop_back();
            step_path(p, work);
        }
    }

private:
    Frame make_frame(const NativeFunction &fn, const std::vector<SymValue> &args)
    {
        Frame f;
        f.fn = &fn;
        for (std::size_t i = 0; i < fn.params.size(); ++i)
            f.regs[fn.params[i].reg] = i < args.size() ? args[i] : SymValue::unknown();
        return f;
    }

    InstrSite site(const Frame &f) const { return {m_.name, f.fn->name, f.pc, f.fn->instrs[f.pc].pos}; }

    void budget_event(InstrSite s, UnresolvedReason r, std::string detail)
    {
        if (!budget_seen_.insert({s, r}).second)
            return;
        out_.budget_events.push_back({std::move(s), r, std::move(detail)});
    }

    static SymValue reg(const Frame &f, const std::string &r)
    {
        auto it = f.regs.find(r);
        return it == f.regs.end() ? SymValue::unknown() : it->second;
    }

    SymValue value_of(const Frame &f, const Operand &o) const
    {
        switch (o.kind)
        {
        case Operand::Kind::reg: return reg(f, o.text);
        case Operand::Kind::integer: return SymValue::integer(o.value);
        case Operand::Kind::string: return SymValue::str(o.text);
        case Operand::Kind::symbol: {
            auto it = m_.string_pool.find(o.text);
            return it == m_.string_pool.end() ? SymValue::unknown() : SymValue::str(it->second);
        }
        case Operand::Kind::function: return SymValue::function_ref(o.text);
        case Operand::Kind::table:
        case Operand::Kind::hole: return SymValue::unknown();
        }
        return SymValue::unknown();
    }

    SymValue read_cell(const PathState &p, const Frame &f, const std::string &table, std::int64_t row,
                       std::int64_t col) const
    {
        if (p.havoced_tables.count(table))
            return SymValue::unknown();
        if (auto it = p.cells.find({table, row, col}); it != p.cells.end())
            return it->second;
        const native::DataTable *t = m_.find_table(table);
        if (!t || row < 0 || col < 0 || static_cast<std::size_t>(row) >= t->rows.size() ||
            static_cast<std::size_t>(col) >= t->rows[row].size())
            return SymValue::unknown();
        return value_of(f, t->rows[row][col]);
    }

    // Registers and table cells assigned anywhere in [from, to] lose their value.
    static void havoc(PathState &p, Frame &f, std::size_t from, std::size_t to)
    {
        for (std::size_t i = from; i <= to && i < f.fn->instrs.size(); ++i)
        {
            const NativeInstr &ins = f.fn->instrs[i];
            if (!ins.dst.empty())
                f.regs[ins.dst] = SymValue::unknown();
            if (ins.op == Opcode::store_table_entry)
            {
                const auto &ops = ins.operands;
                if (ops[1].kind == Operand::Kind::integer && ops[2].kind == Operand::Kind::integer)
                    p.cells[{ops[0].text, ops[1].value, ops[2].value}] = SymValue::unknown();
                else
                    p.havoced_tables.insert(ops[0].text);
            }
        }
    }

    // Moves the current frame to `target`. Backward jumps count against the
    // unroll bound; returns false if the jump may not be taken.
    bool jump(PathState &p, const std::string &target)
    {
        Frame &f = p.frames.back();
        std::size_t to = *f.fn->label_index(target);
        if (to <= f.pc)
        {
            std::size_t &taken = f.back_edges[f.pc];
            if (taken >= b_.loop_unroll)
                return false;
            ++taken;
            havoc(p, f, to, f.pc);
        }
        f.pc = to;
        return true;
    }

    // Pops the current frame; returns false when the root frame returned.
    bool do_return(PathState &p, const SymValue &v)
    {
        std::string result_reg = p.frames.back().result_reg;
        p.frames.pop_back();
        if (p.frames.empty())
            return false;
        if (!result_reg.empty())
            p.frames.back().regs[result_reg] = v;
        return true;
    }

    std::optional<bool> decide(const SymValue &a, const SymValue &b, CmpOp op) const
    {
        if (a.is_integer() && b.is_integer())
            return compare(op, a.number, b.number);
        if (a.is_string() && b.is_string())
            return compare(op, a.text, b.text);
        return std::nullopt;
    }

    void fork(PathState &p, std::vector<PathState> &work, const InstrSite &s, const std::string &target)
    {
        if (started_ >= b_.max_paths)
        {
            budget_event(s, UnresolvedReason::path_budget_exhausted, "path limit " + std::to_string(b_.max_paths));
            return;
        }
        PathState taken = p;
        if (!jump(taken, target))
            return;
        ++started_;
        work.push_back(std::move(taken));
    }

    void intrinsic(PathState &p, const NativeInstr &ins)
    {
        Frame &f = p.frames.back();
        auto arg = [&](std::size_t i) { return value_of(f, ins.operands[i]); };
        SymValue result = SymValue::unknown();
        switch (ins.intrinsic)
        {
        case Intrinsic::FindClass: {
            SymValue name = arg(1);
            result = SymValue::class_handle(name.is_string() ? std::optional(name.text) : std::nullopt);
            break;
        }
        case Intrinsic::GetObjectClass: {
            SymValue obj = arg(1);
            result = SymValue::class_handle(obj.kind == SymValue::Kind::object_handle ? obj.class_name : std::nullopt);
            break;
        }
        case Intrinsic::GetMethodID:
        case Intrinsic::GetStaticMethodID: {
            SymValue cls = arg(1), name = arg(2), sig = arg(3);
            result = SymValue::method_handle(
                cls.kind == SymValue::Kind::class_handle ? cls.class_name : std::nullopt,
                name.is_string() ? std::optional(name.text) : std::nullopt,
                sig.is_string() ? std::optional(sig.text) : std::nullopt, ins.intrinsic == Intrinsic::GetStaticMethodID);
            break;
        }
        case Intrinsic::NewObject: {
            SymValue cls = arg(1);
            result = SymValue::object_handle(cls.kind == SymValue::Kind::class_handle ? cls.class_name : std::nullopt);
            break;
        }
        case Intrinsic::NewStringUTF:
        case Intrinsic::GetStringUTFChars: {
            SymValue s = arg(1);
            result = s.is_string() ? s : SymValue::unknown();
            break;
        }
        case Intrinsic::RegisterNatives: {
            RegistrationEvent ev;
            ev.site = site(f);
            ev.clazz = arg(1);
            const std::string &table = ins.operands[2].text;
            for (std::int64_t r = 0; r < ins.operands[3].value; ++r)
                ev.rows.push_back({static_cast<std::size_t>(r), read_cell(p, f, table, r, 0),
                                   read_cell(p, f, table, r, 1), read_cell(p, f, table, r, 2)});
            std::string key = ev.clazz.render();
            for (const auto &row : ev.rows)
                key += "|" + row.name.render() + "|" + row.signature.render() + "|" + row.function.render();
            if (registration_seen_.insert({ev.site, key}).second)
                out_.registrations.push_back(std::move(ev));
            result = SymValue::integer(0);
            break;
        }
        default: {
            MethodCallEvent ev;
            ev.site = site(f);
            for (const auto &fr : p.frames)
                ev.call_stack.push_back(fr.fn->name);
            SymValue mid = arg(2);
            ev.method = mid.kind == SymValue::Kind::method_handle
                            ? mid
                            : SymValue::method_handle(std::nullopt, std::nullopt, std::nullopt,
                                                      native::is_static_method_call(ins.intrinsic));
            ev.intrinsic = ins.intrinsic;
            if (call_seen_.insert({ev.site, ev.method.render()}).second)
                out_.calls.push_back(ev);
            if (ins.intrinsic == Intrinsic::CallObjectMethod || ins.intrinsic == Intrinsic::CallStaticObjectMethod)
            {
                auto cls = return_class(ev.method.signature);
                if (cls && *cls != "java/lang/String")
                    result = SymValue::object_handle(cls);
            }
            break;
        }
        }
        if (!ins.dst.empty())
            f.regs[ins.dst] = result;
        ++f.pc;
    }

    void step_path(PathState &p, std::vector<PathState> &work)
    {
        for (;;)
        {
            Frame &f = p.frames.back();
            if (f.pc >= f.fn->instrs.size())
            {
                if (!do_return(p, SymValue::unknown()))
                    break;
                continue;
            }
            if (p.steps >= b_.max_instructions)
            {
                budget_event(site(f), UnresolvedReason::path_budget_exhausted,
                             "instruction limit " + std::to_string(b_.max_instructions));
                return;
            }
            ++p.steps;
            const NativeInstr &ins = f.fn->instrs[f.pc];
            const auto &ops = ins.operands;
            switch (ins.op)
            {
            case Opcode::label: ++f.pc; break;
            case Opcode::const_str:
            case Opcode::const_int:
            case Opcode::move:
                f.regs[ins.dst] = value_of(f, ops[0]);
                ++f.pc;
                break;
            case Opcode::add: {
                SymValue a = value_of(f, ops[0]), b = value_of(f, ops[1]);
                f.regs[ins.dst] =
                    a.is_integer() && b.is_integer() ? SymValue::integer(a.number + b.number) : SymValue::unknown();
                ++f.pc;
                break;
            }
            case Opcode::concat: {
                SymValue a = value_of(f, ops[0]), b = value_of(f, ops[1]);
                f.regs[ins.dst] = a.is_string() && b.is_string() ? SymValue::str(a.text + b.text) : SymValue::unknown();
                ++f.pc;
                break;
            }
            case Opcode::load_table_entry: {
                SymValue r = value_of(f, ops[1]), c = value_of(f, ops[2]);
                f.regs[ins.dst] =
                    r.is_integer() && c.is_integer() ? read_cell(p, f, ops[0].text, r.number, c.number) : SymValue::unknown();
                ++f.pc;
                break;
            }
            case Opcode::store_table_entry: {
                SymValue r = value_of(f, ops[1]), c = value_of(f, ops[2]);
                if (r.is_integer() && c.is_integer())
                    p.cells[{ops[0].text, r.number, c.number}] = value_of(f, ops[3]);
                else
                    p.havoced_tables.insert(ops[0].text);
                ++f.pc;
                break;
            }
            case Opcode::call: {
                const NativeFunction *callee = m_.find_function(ins.target);
                if (p.frames.size() >= b_.max_depth)
                {
                    budget_event(site(f), UnresolvedReason::depth_budget_exhausted,
                                 "call depth limit " + std::to_string(b_.max_depth));
                    if (!ins.dst.empty())
                        f.regs[ins.dst] = SymValue::unknown();
                    ++f.pc;
                    break;
                }
                std::vector<SymValue> args;
                for (const auto &o : ops)
                    args.push_back(value_of(f, o));
                Frame callee_frame = make_frame(*callee, args);
                callee_frame.result_reg = ins.dst;
                ++f.pc;
                p.frames.push_back(std::move(callee_frame)); // invalidates f
                break;
            }
            case Opcode::ret: {
                SymValue v = ops.empty() ? SymValue::unknown() : value_of(f, ops[0]);
                if (!do_return(p, v))
                {
                    ++out_.completed_paths;
                    return;
                }
                break;
            }
            case Opcode::go_to:
                if (!jump(p, ins.target))
                    return; // unroll bound reached
                break;
            case Opcode::branch_if: {
                std::optional<bool> d = decide(value_of(f, ops[0]), value_of(f, ops[1]), ins.cmp);
                if (d && *d)
                {
                    if (!jump(p, ins.target))
                        return;
                }
                else if (d)
                    ++f.pc;
                else
                {
                    fork(p, work, site(f), ins.target);
                    ++p.frames.back().pc;
                }
                break;
            }
            case Opcode::intrinsic: intrinsic(p, ins); break;
            }
        }
        ++out_.completed_paths;
    }

    const native::NativeModule &m_;
    const ExecBudget &b_;
    Exploration &out_;
    std::size_t started_ = 0;
    std::set<std::pair<InstrSite, UnresolvedReason>> budget_seen_;
    std::set<std::pair<InstrSite, std::string>> call_seen_;
    std::set<std::pair<InstrSite, std::string>> registration_seen_;
};

} // namespace

SymbolicExecutor::SymbolicExecutor(const native::NativeModule &module, ExecBudget budget)
    : module_(module), budget_(budget)
{
}

Exploration SymbolicExecutor::explore(std::string_view function, const std::vector<SymValue> &args) const
{
    Exploration out;
    const NativeFunction *fn = module_.find_function(function);
    if (!fn)
        throw AnalysisError("no native function '" + std::string(function) + "' in module '" + module_.name + "'");
    Run run(module_, budget_, out);
    run.start(*fn, args);
    return out;
}

} // namespace crosslink::bridge
