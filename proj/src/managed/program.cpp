#include "crosslink/managed/program.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <utility>

#include "crosslink/support/lexer.hpp"

namespace crosslink::managed {

bool is_builtin_type(std::string_view t)
{
    return std::find(std::begin(kBuiltinTypes), std::end(kBuiltinTypes), t) != std::end(kBuiltinTypes);
}

bool is_primitive_type(std::string_view t) { return t == "int" || t == "long" || t == "boolean"; }

bool is_reference_type(std::string_view t) { return !is_primitive_type(t) && t != "void"; }

bool is_assignable(std::string_view to, std::string_view from)
{
    if (to == from)
        return to != "void";
    return to == "object" && is_reference_type(from);
}

std::string class_to_internal(std::string_view class_name)
{
    std::string out(class_name);
    std::replace(out.begin(), out.end(), '.', '/');
    return out;
}

std::string internal_to_class(std::string_view internal)
{
    std::string out(internal);
    std::replace(out.begin(), out.end(), '/', '.');
    return out;
}

std::string type_descriptor(std::string_view t)
{
    if (t == "int") return "I";
    if (t == "long") return "J";
    if (t == "boolean") return "Z";
    if (t == "void") return "V";
    if (t == "string") return "Ljava/lang/String;";
    if (t == "object") return "Ljava/lang/Object;";
    return "L" + class_to_internal(t) + ";";
}

std::optional<TypeName> parse_type_descriptor(std::string_view text, std::size_t &pos)
{
    if (pos >= text.size())
        return std::nullopt;
    char c = text[pos];
    switch (c)
    {
    case 'I': ++pos; return TypeName("int");
    case 'J': ++pos; return TypeName("long");
    case 'Z': ++pos; return TypeName("boolean");
    case 'V': ++pos; return TypeName("void");
    case 'L': {
        std::size_t end = text.find(';', pos);
        if (end == std::string_view::npos || end == pos + 1)
            return std::nullopt;
        std::string_view internal = text.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (internal == "java/lang/String")
            return TypeName("string");
        if (internal == "java/lang/Object")
            return TypeName("object");
        return internal_to_class(internal);
    }
    default: return std::nullopt;
    }
}

std::string MethodId::descriptor() const
{
    std::string out = "(";
    for (const auto &p : param_types)
        out += type_descriptor(p);
    out += ")";
    out += type_descriptor(return_type);
    return out;
}

std::string MethodId::canonical() const
{
    return "L" + class_to_internal(class_name) + ";->" + method_name + descriptor();
}

std::string MethodId::short_name() const
{
    std::size_t dot = class_name.rfind('.');
    std::string simple = dot == std::string::npos ? class_name : class_name.substr(dot + 1);
    return simple + "." + method_name;
}

MethodId MethodId::parse(std::string_view text, const SourcePos &pos)
{
    auto bad = [&](const std::string &why) -> InputError {
        return InputError(pos, "malformed method id '" + std::string(text) + "': " + why);
    };
    if (text.size() < 2 || text[0] != 'L')
        throw bad("must start with 'L'");
    std::size_t arrow = text.find(";->");
    if (arrow == std::string_view::npos)
        throw bad("missing ';->'");
    MethodId id;
    id.class_name = internal_to_class(text.substr(1, arrow - 1));
    std::size_t open = text.find('(', arrow + 3);
    if (open == std::string_view::npos)
        throw bad("missing '('");
    id.method_name = std::string(text.substr(arrow + 3, open - arrow - 3));
    if (id.class_name.empty() || id.method_name.empty())
        throw bad("empty class or method name");
    std::size_t p = open + 1;
    while (p < text.size() && text[p] != ')')
    {
        auto t = parse_type_descriptor(text, p);
        if (!t || *t == "void")
            throw bad("bad parameter descriptor");
        id.param_types.push_back(*t);
    }
    if (p >= text.size())
        throw bad("missing ')'");
    ++p;
    auto ret = parse_type_descriptor(text, p);
    if (!ret || p != text.size())
        throw bad("bad return descriptor");
    id.return_type = *ret;
    return id;
}

bool Literal::fits(std::string_view t) const
{
    switch (kind)
    {
    case Kind::integer: return t == "int" || t == "long";
    case Kind::long_integer: return t == "long";
    case Kind::boolean: return t == "boolean";
    case Kind::string: return t == "string" || t == "object";
    case Kind::null: return is_reference_type(t);
    }
    return false;
}

std::string Literal::render() const
{
    switch (kind)
    {
    case Kind::integer: return std::to_string(int_value);
    case Kind::long_integer: return std::to_string(int_value) + "L";
    case Kind::boolean: return bool_value ? "true" : "false";
    case Kind::string: return quote_string(string_value);
    case Kind::null: return "null";
    }
    return "?";
}

std::string CondOperand::render() const
{
    switch (kind)
    {
    case Kind::local: return name;
    case Kind::literal: return literal.render();
    case Kind::static_field: return field_class + "." + name;
    }
    return "?";
}

Statement Statement::make_assign_const(std::string dst, Literal lit)
{
    Statement s;
    s.kind = StmtKind::assign_const;
    s.dst = std::move(dst);
    s.literal = std::move(lit);
    return s;
}

Statement Statement::make_assign_local(std::string dst, std::string src)
{
    Statement s;
    s.kind = StmtKind::assign_local;
    s.dst = std::move(dst);
    s.src = std::move(src);
    return s;
}

Statement Statement::make_new(std::string dst, TypeName cls)
{
    Statement s;
    s.kind = StmtKind::new_instance;
    s.dst = std::move(dst);
    s.new_class = std::move(cls);
    return s;
}

Statement Statement::make_invoke(InvokeKind kind, std::string result, std::string receiver, MethodId callee,
                                 std::vector<std::string> args)
{
    Statement s;
    s.kind = StmtKind::invoke;
    s.invoke_kind = kind;
    s.dst = std::move(result);
    s.receiver = std::move(receiver);
    s.callee = std::move(callee);
    s.args = std::move(args);
    return s;
}

Statement Statement::make_return(std::string value)
{
    Statement s;
    s.kind = StmtKind::ret;
    s.src = std::move(value);
    return s;
}

Statement Statement::make_if(CondOperand lhs, CmpOp op, CondOperand rhs, std::string target)
{
    Statement s;
    s.kind = StmtKind::if_goto;
    s.lhs = std::move(lhs);
    s.cmp = op;
    s.rhs = std::move(rhs);
    s.label = std::move(target);
    return s;
}

Statement Statement::make_goto(std::string target)
{
    Statement s;
    s.kind = StmtKind::go_to;
    s.label = std::move(target);
    return s;
}

Statement Statement::make_label(std::string name)
{
    Statement s;
    s.kind = StmtKind::label;
    s.label = std::move(name);
    return s;
}

bool operator==(const Statement &a, const Statement &b)
{
    if (a.kind != b.kind)
        return false;
    switch (a.kind)
    {
    case StmtKind::assign_const: return a.dst == b.dst && a.literal == b.literal;
    case StmtKind::assign_local: return a.dst == b.dst && a.src == b.src;
    case StmtKind::binop: return a.dst == b.dst && a.src == b.src && a.src2 == b.src2;
    case StmtKind::new_instance: return a.dst == b.dst && a.new_class == b.new_class;
    case StmtKind::invoke:
        return a.invoke_kind == b.invoke_kind && a.dst == b.dst && a.receiver == b.receiver && a.callee == b.callee &&
               a.args == b.args;
    case StmtKind::ret: return a.src == b.src;
    case StmtKind::if_goto: return a.lhs == b.lhs && a.cmp == b.cmp && a.rhs == b.rhs && a.label == b.label;
    case StmtKind::go_to:
    case StmtKind::label: return a.label == b.label;
    case StmtKind::nop: return true;
    }
    return false;
}

std::optional<TypeName> ManagedMethod::type_of(std::string_view name) const
{
    if (!is_static && name == "this")
        return id.class_name;
    for (std::size_t i = 0; i < param_names.size(); ++i)
        if (param_names[i] == name)
            return id.param_types[i];
    for (const auto &l : locals)
        if (l.name == name)
            return l.type;
    return std::nullopt;
}

std::optional<std::size_t> ManagedMethod::param_index(std::string_view name) const
{
    for (std::size_t i = 0; i < param_names.size(); ++i)
        if (param_names[i] == name)
            return i;
    return std::nullopt;
}

std::optional<std::size_t> ManagedMethod::label_index(std::string_view name) const
{
    for (std::size_t i = 0; i < body.size(); ++i)
        if (body[i].kind == StmtKind::label && body[i].label == name)
            return i;
    return std::nullopt;
}

const Field *ManagedClass::find_field(std::string_view field_name) const
{
    for (const auto &f : fields)
        if (f.name == field_name)
            return &f;
    return nullptr;
}

const ManagedClass *ManagedProgram::find_class(std::string_view name) const
{
    auto it = classes.find(std::string(name));
    return it == classes.end() ? nullptr : &it->second;
}

const ManagedMethod *ManagedProgram::find_method(const MethodId &id) const
{
    const ManagedClass *cls = find_class(id.class_name);
    if (!cls)
        return nullptr;
    for (const auto &m : cls->methods)
        if (m.id == id)
            return &m;
    return nullptr;
}

ManagedMethod *ManagedProgram::find_method(const MethodId &id)
{
    return const_cast<ManagedMethod *>(std::as_const(*this).find_method(id));
}

const ManagedMethod *ManagedProgram::find_by_descriptor(std::string_view class_name, std::string_view method_name,
                                                        std::string_view descriptor) const
{
    const ManagedClass *cls = find_class(class_name);
    if (!cls)
        return nullptr;
    for (const auto &m : cls->methods)
        if (m.id.method_name == method_name && m.id.descriptor() == descriptor)
            return &m;
    return nullptr;
}

bool ManagedProgram::type_exists(std::string_view t) const
{
    return is_builtin_type(t) || classes.count(std::string(t)) > 0;
}

std::vector<MethodId> list_native_methods(const ManagedProgram &p)
{
    std::vector<MethodId> out;
    p.for_each_method([&](const ManagedClass &, const ManagedMethod &m) {
        if (m.is_native)
            out.push_back(m.id);
    });
    std::sort(out.begin(), out.end(), [](const MethodId &a, const MethodId &b) {
        return std::tie(a.class_name, a.method_name, a.param_types, a.return_type) <
               std::tie(b.class_name, b.method_name, b.param_types, b.return_type);
    });
    return out;
}

namespace {

void check_type(const ManagedProgram &p, std::string_view t, const SourcePos &pos, bool allow_void)
{
    if (!p.type_exists(t))
        throw InputError(pos, "unresolved type '" + std::string(t) + "'");
    if (!allow_void && t == "void")
        throw InputError(pos, "'void' is not a value type");
}

TypeName require_local(const ManagedMethod &m, std::string_view name, const SourcePos &pos)
{
    auto t = m.type_of(name);
    if (!t)
        throw InputError(pos, "undeclared local '" + std::string(name) + "' in " + m.id.short_name());
    return *t;
}

void check_body(const ManagedProgram &p, const ManagedMethod &m)
{
    std::set<std::string> names;
    if (!m.is_static)
        names.insert("this");
    for (const auto &n : m.param_names)
        if (!names.insert(n).second)
            throw InputError(m.pos, "duplicate parameter '" + n + "'");
    for (const auto &l : m.locals)
    {
        check_type(p, l.type, m.pos, false);
        if (!names.insert(l.name).second)
            throw InputError(m.pos, "duplicate local '" + l.name + "' in " + m.id.short_name());
    }

    std::set<std::string> labels;
    for (const auto &s : m.body)
        if (s.kind == StmtKind::label && !labels.insert(s.label).second)
            throw InputError(s.pos, "duplicate label '" + s.label + "'");

    for (const auto &s : m.body)
    {
        switch (s.kind)
        {
        case StmtKind::assign_const: {
            TypeName t = require_local(m, s.dst, s.pos);
            if (!s.literal.fits(t))
                throw InputError(s.pos, "literal " + s.literal.render() + " does not fit local of type " + t);
            break;
        }
        case StmtKind::assign_local: {
            TypeName to = require_local(m, s.dst, s.pos);
            TypeName from = require_local(m, s.src, s.pos);
            if (!is_assignable(to, from))
                throw InputError(s.pos, "cannot assign " + from + " to " + to);
            break;
        }
        case StmtKind::binop: {
            TypeName to = require_local(m, s.dst, s.pos);
            TypeName a = require_local(m, s.src, s.pos);
            TypeName b = require_local(m, s.src2, s.pos);
            bool numeric = (to == "int" || to == "long") && (a == "int" || a == "long") && (b == "int" || b == "long");
            if (!numeric && to != "string")
                throw InputError(s.pos, "'+' needs numeric operands or a string result");
            break;
        }
        case StmtKind::new_instance: {
            TypeName to = require_local(m, s.dst, s.pos);
            if (is_builtin_type(s.new_class) || !p.find_class(s.new_class))
                throw InputError(s.pos, "cannot instantiate '" + s.new_class + "'");
            if (!is_assignable(to, s.new_class))
                throw InputError(s.pos, "cannot assign " + s.new_class + " to " + to);
            break;
        }
        case StmtKind::invoke: {
            const ManagedMethod *callee = p.find_method(s.callee);
            if (!callee)
                throw InputError(s.pos, "unresolved callee " + s.callee.canonical());
            if ((s.invoke_kind == InvokeKind::static_call) != callee->is_static)
                throw InputError(s.pos, "invoke kind does not match callee " + s.callee.short_name());
            if (s.invoke_kind == InvokeKind::virtual_call)
            {
                TypeName rt = require_local(m, s.receiver, s.pos);
                if (rt != s.callee.class_name)
                    throw InputError(s.pos, "receiver '" + s.receiver + "' has type " + rt + ", expected " +
                                                s.callee.class_name);
            }
            if (s.args.size() != s.callee.param_types.size())
                throw InputError(s.pos, "wrong argument count for " + s.callee.short_name());
            for (std::size_t i = 0; i < s.args.size(); ++i)
            {
                TypeName at = require_local(m, s.args[i], s.pos);
                if (!is_assignable(s.callee.param_types[i], at))
                    throw InputError(s.pos, "argument '" + s.args[i] + "' of type " + at + " does not match " +
                                                s.callee.param_types[i]);
            }
            if (!s.dst.empty())
            {
                TypeName rt = require_local(m, s.dst, s.pos);
                if (s.callee.return_type == "void" || !is_assignable(rt, s.callee.return_type))
                    throw InputError(s.pos, "cannot store result of " + s.callee.short_name() + " in " + rt);
            }
            break;
        }
        case StmtKind::ret: {
            if (s.src.empty())
            {
                if (m.id.return_type != "void")
                    throw InputError(s.pos, "missing return value in " + m.id.short_name());
            }
            else
            {
                TypeName t = require_local(m, s.src, s.pos);
                if (!is_assignable(m.id.return_type, t))
                    throw InputError(s.pos, "returning " + t + " from method of type " + m.id.return_type);
            }
            break;
        }
        case StmtKind::if_goto: {
            for (const CondOperand *op : {&s.lhs, &s.rhs})
            {
                if (op->kind == CondOperand::Kind::local)
                    require_local(m, op->name, s.pos);
                else if (op->kind == CondOperand::Kind::static_field)
                {
                    const ManagedClass *cls = p.find_class(op->field_class);
                    const Field *f = cls ? cls->find_field(op->name) : nullptr;
                    if (!f || !f->is_static)
                        throw InputError(s.pos, "unknown static field " + op->render());
                }
            }
            [[fallthrough]];
        }
        case StmtKind::go_to:
            if (!labels.count(s.label))
                throw InputError(s.pos, "branch target '" + s.label + "' is not a label in " + m.id.short_name());
            break;
        case StmtKind::label:
        case StmtKind::nop: break;
        }
    }
}

} // namespace

void validate(const ManagedProgram &p)
{
    for (const auto &[name, cls] : p.classes)
    {
        if (is_builtin_type(name))
            throw InputError(cls.pos, "class name '" + name + "' shadows a builtin type");
        std::set<std::string> field_names;
        for (const auto &f : cls.fields)
        {
            check_type(p, f.type, cls.pos, false);
            if (!field_names.insert(f.name).second)
                throw InputError(cls.pos, "duplicate field '" + f.name + "' in " + name);
        }
        std::set<MethodId> ids;
        for (const auto &m : cls.methods)
        {
            if (m.id.class_name != name)
                throw InputError(m.pos, "method " + m.id.canonical() + " filed under class " + name);
            if (!ids.insert(m.id).second)
                throw InputError(m.pos, "duplicate method " + m.id.canonical());
            for (const auto &t : m.id.param_types)
                check_type(p, t, m.pos, false);
            check_type(p, m.id.return_type, m.pos, true);
            if (m.param_names.size() != m.id.param_types.size())
                throw InputError(m.pos, "parameter name count mismatch in " + m.id.short_name());
            if (m.is_native && m.is_extern)
                throw InputError(m.pos, "method cannot be both native and extern");
            if (!m.has_body())
            {
                if (!m.body.empty() || !m.locals.empty())
                    throw InputError(m.pos, std::string(m.is_native ? "native" : "extern") + " method " +
                                                m.id.short_name() + " must not have a body");
                continue;
            }
            check_body(p, m);
        }
    }
    for (std::size_t i = 0; i < p.entry_points.size(); ++i)
    {
        const MethodId &ep = p.entry_points[i];
        const ManagedMethod *m = p.find_method(ep);
        if (!m)
            throw InputError(i < p.entry_positions.size() ? p.entry_positions[i] : SourcePos{},
                             "unresolved entrypoint " + ep.canonical());
        if (!m->has_body())
            throw InputError(m->pos, "entrypoint " + ep.canonical() + " has no body");
    }
}

} // namespace crosslink::managed
