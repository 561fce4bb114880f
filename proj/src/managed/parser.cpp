#include "crosslink/managed/parser.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "crosslink/support/lexer.hpp"

namespace crosslink::managed {

namespace {

// An invoke whose callee signature is filled in once every class is known.
struct PendingInvoke
{
    std::string class_name;
    std::size_t method_index = 0;
    std::size_t stmt_index = 0;
    std::string target; // static: class name; virtual: receiver local
    std::string method_name;
};

std::pair<std::string, std::string> split_qualified(const std::string &text)
{
    auto dot = text.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size())
        return {{}, {}};
    return {text.substr(0, dot), text.substr(dot + 1)};
}

class ManagedParser
{
public:
    explicit ManagedParser(ManagedProgram &program) : program_(program) {}

    void parse_file(const SourceFile &file)
    {
        auto lines = split_lines(file.text);
        for (std::size_t i = 0; i < lines.size(); ++i)
        {
            int line_no = static_cast<int>(i) + 1;
            SourcePos line_pos{file.name, line_no, 1};
            std::string_view line = lines[i];
            std::size_t indent = line.find_first_not_of(" \t");
            if (state_ == State::top && indent != std::string_view::npos &&
                line.substr(indent, 10) == "entrypoint" &&
                (line.size() == indent + 10 || std::isspace(static_cast<unsigned char>(line[indent + 10]))))
            {
                parse_entrypoint(line, {file.name, line_no, static_cast<int>(indent) + 1});
                continue;
            }
            auto tokens = tokenize_line(line, line_no, file.name);
            if (tokens.empty())
                continue;
            TokenCursor cur(std::move(tokens), line_pos);
            switch (state_)
            {
            case State::top: parse_top(cur); break;
            case State::in_class: parse_class_member(cur); break;
            case State::in_method: parse_method_line(cur); break;
            }
        }
        if (state_ != State::top)
            throw InputError({file.name, static_cast<int>(lines.size()) + 1, 1}, "expected '}' before end of file");
    }

    void resolve()
    {
        for (const auto &pending : pending_)
            resolve_invoke(pending);
    }

private:
    enum class State { top, in_class, in_method };

    void parse_entrypoint(std::string_view line, const SourcePos &pos)
    {
        std::string_view rest = line.substr(static_cast<std::size_t>(pos.column - 1) + std::string_view("entrypoint").size());
        if (auto hash = rest.find('#'); hash != std::string_view::npos)
            rest = rest.substr(0, hash);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.front())))
            rest.remove_prefix(1);
        while (!rest.empty() && std::isspace(static_cast<unsigned char>(rest.back())))
            rest.remove_suffix(1);
        if (rest.empty())
            throw InputError(pos, "expected method id after 'entrypoint'");
        program_.entry_points.push_back(MethodId::parse(rest, pos));
        program_.entry_positions.push_back(pos);
    }

    void parse_top(TokenCursor &cur)
    {
        if (!cur.accept_ident("class"))
        {
            if (cur.peek().kind == TokenKind::ident)
                cur.fail("unknown directive '" + cur.peek().text + "'");
            cur.fail_expected("'class' or 'entrypoint'");
        }
        SourcePos pos = cur.peek().pos;
        std::string name = cur.expect_ident("class name");
        cur.expect_punct("{");
        cur.expect_end();
        if (program_.classes.count(name))
            throw InputError(pos, "duplicate class '" + name + "'");
        ManagedClass cls;
        cls.name = name;
        cls.pos = pos;
        program_.classes.emplace(name, std::move(cls));
        current_class_ = name;
        state_ = State::in_class;
    }

    ManagedClass &current_class() { return program_.classes.at(current_class_); }

    void parse_class_member(TokenCursor &cur)
    {
        if (cur.accept_punct("}"))
        {
            cur.expect_end();
            state_ = State::top;
            return;
        }
        if (cur.accept_ident("field"))
        {
            Field f;
            f.is_static = cur.accept_ident("static");
            f.type = cur.expect_ident("field type");
            f.name = cur.expect_ident("field name");
            cur.expect_end();
            current_class().fields.push_back(std::move(f));
            return;
        }

        ManagedMethod m;
        m.pos = cur.peek().pos;
        for (;;)
        {
            if (cur.accept_ident("static"))
                m.is_static = true;
            else if (cur.accept_ident("native"))
                m.is_native = true;
            else if (cur.accept_ident("extern"))
                m.is_extern = true;
            else
                break;
        }
        m.id.class_name = current_class_;
        m.id.return_type = cur.expect_ident("return type");
        SourcePos name_pos = cur.peek().pos;
        m.id.method_name = cur.expect_ident("method name");
        if (m.id.method_name.find('.') != std::string::npos)
            throw InputError(name_pos, "method name must not contain '.'");
        cur.expect_punct("(");
        if (!cur.accept_punct(")"))
        {
            do
            {
                m.id.param_types.push_back(cur.expect_ident("parameter type"));
                m.param_names.push_back(cur.expect_ident("parameter name"));
            } while (cur.accept_punct(","));
            cur.expect_punct(")");
        }
        bool opens_body = cur.accept_punct("{");
        cur.expect_end();

        if (m.is_native && m.is_extern)
            throw InputError(m.pos, "method cannot be both native and extern");
        if (!m.has_body() && opens_body)
            throw InputError(m.pos, std::string(m.is_native ? "native" : "extern") + " method '" + m.id.method_name +
                                        "' must not have a body");
        if (m.has_body() && !opens_body)
            throw InputError(cur.peek().pos, "expected '{' to open the body of '" + m.id.method_name + "'");

        for (const auto &existing : current_class().methods)
            if (existing.id == m.id)
                throw InputError(m.pos, "duplicate method " + m.id.canonical());

        declared_.clear();
        if (!m.is_static)
            declared_.insert("this");
        for (const auto &n : m.param_names)
            declared_.insert(n);

        current_class().methods.push_back(std::move(m));
        if (opens_body)
            state_ = State::in_method;
    }

    ManagedMethod &current_method() { return current_class().methods.back(); }

    void require_declared(const std::string &name, const SourcePos &pos)
    {
        if (!declared_.count(name))
            throw InputError(pos, "local '" + name + "' used before declaration");
    }

    std::string expect_local(TokenCursor &cur)
    {
        SourcePos pos = cur.peek().pos;
        std::string name = cur.expect_ident("local name");
        require_declared(name, pos);
        return name;
    }

    Literal parse_literal(TokenCursor &cur)
    {
        const Token &t = cur.peek();
        if (t.kind == TokenKind::integer)
        {
            Token tok = cur.next();
            return tok.long_suffix ? Literal::make_long(tok.value) : Literal::make_int(tok.value);
        }
        if (t.kind == TokenKind::string)
            return Literal::make_string(cur.next().text);
        if (cur.accept_ident("true"))
            return Literal::make_bool(true);
        if (cur.accept_ident("false"))
            return Literal::make_bool(false);
        if (cur.accept_ident("null"))
            return Literal::make_null();
        cur.fail_expected("literal");
    }

    CondOperand parse_cond_operand(TokenCursor &cur)
    {
        CondOperand op;
        const Token &t = cur.peek();
        if (t.kind == TokenKind::ident && t.text != "true" && t.text != "false" && t.text != "null")
        {
            SourcePos pos = t.pos;
            std::string text = cur.next().text;
            if (text.find('.') != std::string::npos)
            {
                auto [cls, field] = split_qualified(text);
                if (cls.empty())
                    throw InputError(pos, "malformed static field reference '" + text + "'");
                op.kind = CondOperand::Kind::static_field;
                op.field_class = cls;
                op.name = field;
            }
            else
            {
                require_declared(text, pos);
                op.kind = CondOperand::Kind::local;
                op.name = text;
            }
            return op;
        }
        op.kind = CondOperand::Kind::literal;
        op.literal = parse_literal(cur);
        return op;
    }

    void parse_invoke(TokenCursor &cur, Statement &s)
    {
        if (cur.accept_ident("static"))
            s.invoke_kind = InvokeKind::static_call;
        else if (cur.accept_ident("virtual"))
            s.invoke_kind = InvokeKind::virtual_call;
        else
            cur.fail_expected("'static' or 'virtual'");

        SourcePos target_pos = cur.peek().pos;
        std::string qualified = cur.expect_ident("qualified callee");
        auto [target, name] = split_qualified(qualified);
        if (target.empty())
            throw InputError(target_pos, "expected '<class>.<method>' or '<receiver>.<method>', found '" + qualified + "'");
        if (s.invoke_kind == InvokeKind::virtual_call)
        {
            require_declared(target, target_pos);
            s.receiver = target;
        }
        cur.expect_punct("(");
        if (!cur.accept_punct(")"))
        {
            do
                s.args.push_back(expect_local(cur));
            while (cur.accept_punct(","));
            cur.expect_punct(")");
        }

        PendingInvoke p;
        p.class_name = current_class_;
        p.method_index = current_class().methods.size() - 1;
        p.stmt_index = current_method().body.size();
        p.target = target;
        p.method_name = name;
        pending_.push_back(std::move(p));
    }

    void parse_method_line(TokenCursor &cur)
    {
        ManagedMethod &m = current_method();
        SourcePos pos = cur.peek().pos;

        if (cur.accept_punct("}"))
        {
            cur.expect_end();
            state_ = State::in_class;
            return;
        }
        if (cur.accept_ident("var"))
        {
            Local l;
            l.type = cur.expect_ident("local type");
            SourcePos name_pos = cur.peek().pos;
            l.name = cur.expect_ident("local name");
            cur.expect_end();
            if (declared_.count(l.name))
                throw InputError(name_pos, "redeclaration of '" + l.name + "'");
            declared_.insert(l.name);
            m.locals.push_back(std::move(l));
            return;
        }

        Statement s;
        if (cur.accept_ident("nop"))
            s.kind = StmtKind::nop;
        else if (cur.accept_ident("goto"))
        {
            s.kind = StmtKind::go_to;
            s.label = cur.expect_ident("label");
        }
        else if (cur.accept_ident("return"))
        {
            s.kind = StmtKind::ret;
            if (!cur.at_end())
                s.src = expect_local(cur);
        }
        else if (cur.accept_ident("if"))
        {
            s.kind = StmtKind::if_goto;
            s.lhs = parse_cond_operand(cur);
            const Token &op = cur.peek();
            if (op.kind != TokenKind::punct || !parse_cmp_op(op.text, s.cmp))
                cur.fail_expected("comparison operator");
            cur.next();
            s.rhs = parse_cond_operand(cur);
            if (!cur.accept_ident("goto"))
                cur.fail_expected("'goto'");
            s.label = cur.expect_ident("label");
        }
        else if (cur.peek_ident("invoke"))
        {
            cur.next();
            s.kind = StmtKind::invoke;
            parse_invoke(cur, s);
        }
        else if (cur.peek().kind == TokenKind::ident && cur.peek_punct(":", 1))
        {
            s.kind = StmtKind::label;
            s.label = cur.next().text;
            cur.next();
        }
        else if (cur.peek().kind == TokenKind::ident && cur.peek_punct("=", 1))
        {
            s.dst = expect_local(cur);
            cur.next();
            if (cur.accept_ident("const"))
            {
                s.kind = StmtKind::assign_const;
                s.literal = parse_literal(cur);
            }
            else if (cur.accept_ident("new"))
            {
                s.kind = StmtKind::new_instance;
                s.new_class = cur.expect_ident("class name");
            }
            else if (cur.accept_ident("invoke"))
            {
                s.kind = StmtKind::invoke;
                parse_invoke(cur, s);
            }
            else
            {
                s.src = expect_local(cur);
                s.kind = StmtKind::assign_local;
                if (cur.accept_punct("+"))
                {
                    s.kind = StmtKind::binop;
                    s.src2 = expect_local(cur);
                }
            }
        }
        else
            cur.fail_expected("statement");

        cur.expect_end();
        s.pos = pos;
        m.body.push_back(std::move(s));
    }

    void resolve_invoke(const PendingInvoke &pending)
    {
        ManagedMethod &caller = program_.classes.at(pending.class_name).methods[pending.method_index];
        Statement &s = caller.body[pending.stmt_index];

        std::string callee_class = pending.target;
        if (s.invoke_kind == InvokeKind::virtual_call)
            callee_class = *caller.type_of(pending.target);

        const ManagedClass *cls = program_.find_class(callee_class);
        if (!cls)
            throw InputError(s.pos, "unresolved class '" + callee_class + "' in invoke of '" + pending.method_name + "'");

        std::vector<TypeName> arg_types;
        for (const auto &a : s.args)
            arg_types.push_back(*caller.type_of(a));

        std::vector<const ManagedMethod *> viable;
        std::vector<const ManagedMethod *> exact;
        for (const auto &m : cls->methods)
        {
            if (m.id.method_name != pending.method_name || m.id.param_types.size() != arg_types.size())
                continue;
            if (m.is_static != (s.invoke_kind == InvokeKind::static_call))
                continue;
            bool ok = true;
            for (std::size_t i = 0; i < arg_types.size() && ok; ++i)
                ok = is_assignable(m.id.param_types[i], arg_types[i]);
            if (!ok)
                continue;
            viable.push_back(&m);
            if (m.id.param_types == arg_types)
                exact.push_back(&m);
        }
        auto &pool = exact.empty() ? viable : exact;
        if (pool.size() > 1 && !s.dst.empty())
        {
            TypeName rt = *caller.type_of(s.dst);
            std::vector<const ManagedMethod *> filtered;
            for (const auto *m : pool)
                if (m->id.return_type == rt)
                    filtered.push_back(m);
            if (!filtered.empty())
                pool = filtered;
        }
        if (pool.empty())
        {
            std::string sig;
            for (std::size_t i = 0; i < arg_types.size(); ++i)
                sig += (i ? ", " : "") + arg_types[i];
            throw InputError(s.pos, "unresolved callee " + callee_class + "." + pending.method_name + "(" + sig + ")");
        }
        if (pool.size() > 1)
            throw InputError(s.pos, "ambiguous callee " + callee_class + "." + pending.method_name);
        s.callee = pool.front()->id;
    }

    ManagedProgram &program_;
    State state_ = State::top;
    std::string current_class_;
    std::set<std::string> declared_;
    std::vector<PendingInvoke> pending_;
};

} // namespace

ManagedProgram parse_managed(std::span<const SourceFile> files)
{
    ManagedProgram program;
    ManagedParser parser(program);
    for (const auto &f : files)
        parser.parse_file(f);
    parser.resolve();
    validate(program);
    return program;
}

ManagedProgram parse_managed(std::string_view text, const std::string &file)
{
    SourceFile f{file, std::string(text)};
    return parse_managed(std::span<const SourceFile>(&f, 1));
}

std::string print_statement(const Statement &s)
{
    std::string out;
    auto invoke_text = [&]() {
        std::string t = "invoke ";
        if (s.invoke_kind == InvokeKind::static_call)
            t += "static " + s.callee.class_name + "." + s.callee.method_name;
        else
            t += "virtual " + s.receiver + "." + s.callee.method_name;
        t += "(";
        for (std::size_t i = 0; i < s.args.size(); ++i)
            t += (i ? ", " : "") + s.args[i];
        t += ")";
        return t;
    };
    switch (s.kind)
    {
    case StmtKind::assign_const: out = s.dst + " = const " + s.literal.render(); break;
    case StmtKind::assign_local: out = s.dst + " = " + s.src; break;
    case StmtKind::binop: out = s.dst + " = " + s.src + " + " + s.src2; break;
    case StmtKind::new_instance: out = s.dst + " = new " + s.new_class; break;
    case StmtKind::invoke: out = (s.dst.empty() ? "" : s.dst + " = ") + invoke_text(); break;
    case StmtKind::ret: out = s.src.empty() ? "return" : "return " + s.src; break;
    case StmtKind::if_goto:
        out = "if " + s.lhs.render() + " " + to_string(s.cmp) + " " + s.rhs.render() + " goto " + s.label;
        break;
    case StmtKind::go_to: out = "goto " + s.label; break;
    case StmtKind::label: out = s.label + ":"; break;
    case StmtKind::nop: out = "nop"; break;
    }
    return out;
}

std::string print_managed(const ManagedProgram &p)
{
    std::ostringstream os;
    bool first = true;
    for (const auto &[name, cls] : p.classes)
    {
        if (!first)
            os << "\n";
        first = false;
        os << "class " << name << " {\n";
        for (const auto &f : cls.fields)
            os << "    field " << (f.is_static ? "static " : "") << f.type << " " << f.name << "\n";
        for (const auto &m : cls.methods)
        {
            os << "    ";
            if (m.is_static)
                os << "static ";
            if (m.is_native)
                os << "native ";
            if (m.is_extern)
                os << "extern ";
            os << m.id.return_type << " " << m.id.method_name << "(";
            for (std::size_t i = 0; i < m.param_names.size(); ++i)
                os << (i ? ", " : "") << m.id.param_types[i] << " " << m.param_names[i];
            os << ")";
            if (!m.has_body())
            {
                os << "\n";
                continue;
            }
            os << " {\n";
            for (const auto &l : m.locals)
                os << "        var " << l.type << " " << l.name << "\n";
            for (const auto &s : m.body)
                os << (s.kind == StmtKind::label ? "      " : "        ") << print_statement(s) << "\n";
            os << "    }\n";
        }
        os << "}\n";
    }
    if (!p.entry_points.empty())
    {
        os << "\n";
        for (const auto &ep : p.entry_points)
            os << "entrypoint " << ep.canonical() << "\n";
    }
    return os.str();
}

} // namespace crosslink::managed
