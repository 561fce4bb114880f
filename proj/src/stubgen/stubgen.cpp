#include "crosslink/stubgen/stubgen.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace crosslink::stubgen {

using managed::CondOperand;
using managed::InvokeKind;
using managed::Literal;
using managed::ManagedMethod;
using managed::ManagedProgram;
using managed::MethodId;
using managed::Statement;
using managed::TypeName;

namespace {

Literal default_literal(const TypeName &t)
{
    if (t == "int")
        return Literal::make_int(0);
    if (t == "long")
        return Literal::make_long(0);
    if (t == "boolean")
        return Literal::make_bool(false);
    return Literal::make_null();
}

CondOperand opaque_operand()
{
    CondOperand c;
    c.kind = CondOperand::Kind::static_field;
    c.field_class = stub_class;
    c.name = opaque_field;
    return c;
}

CondOperand zero_operand()
{
    CondOperand c;
    c.kind = CondOperand::Kind::literal;
    c.literal = Literal::make_int(0);
    return c;
}

class StubBuilder
{
public:
    StubBuilder(const ManagedProgram &p, const ManagedMethod &native, const std::string &name, const StubOptions &o)
        : p_(p), opts_(o)
    {
        m_.id = {stub_class, name, native.id.param_types, native.id.return_type};
        m_.param_names = native.param_names;
        m_.is_static = true;
        m_.pos = native.pos;
        for (const auto &n : m_.param_names)
            used_.insert(n);
        report_.native_method = native.id;
        report_.stub = m_.id;
    }

    void add_target(const MethodId &target, std::size_t k)
    {
        const ManagedMethod *callee = p_.find_method(target);
        if (!p_.find_class(target.class_name) || !callee)
            throw AnalysisError("stub " + m_.id.method_name + " targets " + target.canonical() +
                                " whose class is not declared");
        StubTargetReport tr;
        tr.target = target;

        // Step 1: a fresh local receiving the target's result.
        std::string result;
        if (target.return_type != "void")
        {
            result = declare("ret" + std::to_string(k), target.return_type);
            emit(Statement::make_assign_const(result, default_literal(target.return_type)));
        }

        // Step 2: a receiver object for instance targets.
        std::string receiver;
        if (!callee->is_static)
        {
            receiver = find_local(target.class_name, result);
            if (receiver.empty())
            {
                receiver = declare("recv" + std::to_string(k), target.class_name);
                emit(Statement::make_new(receiver, target.class_name));
                MethodId ctor{target.class_name, "<init>", {}, "void"};
                if (p_.find_method(ctor))
                    emit(Statement::make_invoke(InvokeKind::virtual_call, {}, receiver, ctor, {}));
            }
        }

        // Step 3: one guarded call per argument tuple.
        std::vector<std::vector<std::string>> candidates;
        for (std::size_t i = 0; i < target.param_types.size(); ++i)
        {
            const TypeName &t = target.param_types[i];
            std::vector<std::string> c = visible_of(t, result);
            if (c.empty())
            {
                std::string arg = declare("arg" + std::to_string(k) + "_" + std::to_string(i), t);
                emit(Statement::make_assign_const(arg, default_literal(t)));
                c.push_back(arg);
            }
            candidates.push_back(std::move(c));
        }
        tr.candidates = candidates;
        tr.combinations = 1;
        for (const auto &c : candidates)
            tr.combinations *= c.size();
        std::size_t emit_count = std::min(tr.combinations, opts_.perm_cap);
        tr.cap_applied = emit_count < tr.combinations;

        std::vector<std::size_t> digits(candidates.size(), 0);
        for (std::size_t n = 0; n < emit_count; ++n)
        {
            std::vector<std::string> args;
            for (std::size_t i = 0; i < candidates.size(); ++i)
                args.push_back(candidates[i][digits[i]]);
            for (std::size_t i = candidates.size(); i-- > 0;)
            {
                if (++digits[i] < candidates[i].size())
                    break;
                digits[i] = 0;
            }
            std::string skip = "Lskip" + std::to_string(label_counter_++);
            emit(Statement::make_if(opaque_operand(), CmpOp::ne, zero_operand(), skip));
            emit(Statement::make_invoke(callee->is_static ? InvokeKind::static_call : InvokeKind::virtual_call, result,
                                        receiver, target, args));
            emit(Statement::make_label(skip));
            tr.tuples.push_back(std::move(args));
        }
        report_.targets.push_back(std::move(tr));
    }

    // Step 4: every local of the return type may be returned.
    StubBuild finish()
    {
        const TypeName &rt = m_.id.return_type;
        if (rt == "void")
            emit(Statement::make_return());
        else
        {
            std::vector<std::string> locals;
            for (const auto &l : m_.locals)
                if (managed::is_assignable(rt, l.type))
                    locals.push_back(l.name);
            if (locals.empty())
            {
                std::string v = declare("retval", rt);
                emit(Statement::make_assign_const(v, default_literal(rt)));
                locals.push_back(v);
            }
            for (const auto &l : locals)
            {
                std::string skip = "Lret" + std::to_string(label_counter_++);
                emit(Statement::make_if(opaque_operand(), CmpOp::ne, zero_operand(), skip));
                emit(Statement::make_return(l));
                emit(Statement::make_label(skip));
            }
            std::vector<std::string> all = visible_of(rt, {});
            emit(Statement::make_return(all.front()));
        }
        return {std::move(m_), std::move(report_)};
    }

private:
    std::string declare(const std::string &base, const TypeName &t)
    {
        std::string name = base;
        while (used_.count(name))
            name += "_";
        used_.insert(name);
        m_.locals.push_back({name, t});
        return name;
    }

    void emit(Statement s)
    {
        s.pos = m_.pos;
        m_.body.push_back(std::move(s));
    }

    // Parameters, then locals in declaration order, assignable to `t`.
    std::vector<std::string> visible_of(const TypeName &t, const std::string &exclude) const
    {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < m_.param_names.size(); ++i)
            if (managed::is_assignable(t, m_.id.param_types[i]))
                out.push_back(m_.param_names[i]);
        for (const auto &l : m_.locals)
            if (l.name != exclude && managed::is_assignable(t, l.type))
                out.push_back(l.name);
        return out;
    }

    std::string find_local(const TypeName &cls, const std::string &exclude) const
    {
        for (std::size_t i = 0; i < m_.param_names.size(); ++i)
            if (m_.id.param_types[i] == cls)
                return m_.param_names[i];
        for (const auto &l : m_.locals)
            if (l.name != exclude && l.type == cls)
                return l.name;
        return {};
    }

    const ManagedProgram &p_;
    const StubOptions &opts_;
    ManagedMethod m_;
    StubReport report_;
    std::set<std::string> used_;
    std::size_t label_counter_ = 0;
};

std::string sanitize(const std::string &s)
{
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
    return out;
}

} // namespace

StubBuild synthesize_stub(const ManagedProgram &p, const ManagedMethod &native_method, const std::string &stub_name,
                          std::span<const MethodId> targets, const StubOptions &options)
{
    StubBuilder b(p, native_method, stub_name, options);
    for (std::size_t k = 0; k < targets.size(); ++k)
        b.add_target(targets[k], k);
    return b.finish();
}

std::size_t rewrite_call_sites(ManagedProgram &p, const std::map<MethodId, MethodId> &native_to_stub)
{
    std::size_t n = 0;
    for (auto &[name, cls] : p.classes)
        for (auto &m : cls.methods)
            for (auto &s : m.body)
            {
                if (s.kind != managed::StmtKind::invoke)
                    continue;
                auto it = native_to_stub.find(s.callee);
                if (it == native_to_stub.end())
                    continue;
                s.invoke_kind = InvokeKind::static_call;
                s.receiver.clear();
                s.callee = it->second;
                ++n;
            }
    return n;
}

InjectResult inject_stubs(const ManagedProgram &p, const bridge::BindingSet &bindings, const StubOptions &options)
{
    if (p.find_class(stub_class))
        throw AnalysisError(std::string("class name ") + stub_class + " is reserved for generated stubs");
    InjectResult out;
    out.program = p;
    managed::ManagedClass dummy;
    dummy.name = stub_class;
    dummy.fields.push_back({opaque_field, "int", true});

    std::set<std::string> used_names;
    std::map<MethodId, MethodId> native_to_stub;
    for (std::size_t i = 0; i < bindings.entries.size(); ++i)
    {
        const auto &entry = bindings.entries[i];
        const ManagedMethod *native = p.find_method(entry.method);
        if (!native)
            throw AnalysisError("entry binding refers to unknown method " + entry.method.canonical());

        std::string name = entry.native_fn.function;
        if (used_names.count(name))
            name += "$" + sanitize(entry.native_fn.module);
        for (std::size_t n = 2; used_names.count(name); ++n)
            name = entry.native_fn.function + "$" + sanitize(entry.native_fn.module) + "$" + std::to_string(n);
        used_names.insert(name);

        std::vector<MethodId> targets;
        std::set<MethodId> seen;
        if (i < bindings.relation.size())
            for (std::size_t x : bindings.relation[i])
                if (seen.insert(bindings.exits[x].target).second)
                    targets.push_back(bindings.exits[x].target);

        StubBuild b = synthesize_stub(p, *native, name, targets, options);
        b.report.native_fn = entry.native_fn.node_id();
        native_to_stub.emplace(entry.method, b.method.id);
        dummy.methods.push_back(std::move(b.method));
        out.stubs.push_back(std::move(b.report));
    }
    out.program.classes.emplace(stub_class, std::move(dummy));
    out.rewritten_sites = rewrite_call_sites(out.program, native_to_stub);
    managed::validate(out.program);
    return out;
}

Json stubs_to_json(const InjectResult &r)
{
    Json stubs = Json::array();
    for (const auto &s : r.stubs)
    {
        Json targets = Json::array();
        for (const auto &t : s.targets)
            targets.push_back({{"target", t.target.canonical()},
                               {"combinations", t.combinations},
                               {"emitted", t.tuples.size()},
                               {"cap_applied", t.cap_applied},
                               {"candidates", t.candidates},
                               {"tuples", t.tuples}});
        stubs.push_back({{"native_method", s.native_method.canonical()},
                         {"stub", s.stub.canonical()},
                         {"native", s.native_fn},
                         {"targets", std::move(targets)}});
    }
    return Json{{"schema", stubs_schema}, {"rewritten_sites", r.rewritten_sites}, {"stubs", std::move(stubs)}};
}

} // namespace crosslink::stubgen
