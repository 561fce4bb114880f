#include "crosslink/native/parser.hpp"

#include <sstream>

#include "crosslink/support/lexer.hpp"

namespace crosslink::native {

namespace {

class NativeParser
{
public:
    explicit NativeParser(NativeModule &module) : module_(module) {}

    void parse(std::string_view text, const std::string &file)
    {
        auto lines = split_lines(text);
        for (std::size_t i = 0; i < lines.size(); ++i)
        {
            int line_no = static_cast<int>(i) + 1;
            auto tokens = tokenize_line(lines[i], line_no, file);
            if (tokens.empty())
                continue;
            TokenCursor cur(std::move(tokens), {file, line_no, 1});
            switch (state_)
            {
            case State::top: parse_top(cur, file); break;
            case State::in_module: parse_module_item(cur); break;
            case State::in_table: parse_table_row(cur); break;
            case State::in_function: parse_instr(cur); break;
            case State::done: cur.fail("only one module per file");
            }
        }
        if (state_ != State::top && state_ != State::done)
            throw InputError({file, static_cast<int>(lines.size()) + 1, 1}, "expected '}' before end of file");
    }

private:
    enum class State { top, in_module, in_table, in_function, done };

    void parse_top(TokenCursor &cur, const std::string &file)
    {
        if (!cur.accept_ident("module"))
            cur.fail_expected("'module'");
        module_.name = cur.expect_string("module name");
        if (module_.name.empty())
            cur.fail("module name must not be empty");
        module_.source_file = file;
        cur.expect_punct("{");
        cur.expect_end();
        state_ = State::in_module;
    }

    void parse_module_item(TokenCursor &cur)
    {
        if (cur.accept_punct("}"))
        {
            cur.expect_end();
            state_ = State::done;
            return;
        }
        if (cur.accept_ident("string"))
        {
            cur.expect_punct("@");
            SourcePos pos = cur.peek().pos;
            std::string sym = cur.expect_ident("symbol name");
            cur.expect_punct("=");
            std::string value = cur.expect_string("string constant");
            cur.expect_end();
            if (!module_.string_pool.emplace(sym, value).second)
                throw InputError(pos, "duplicate string symbol '@" + sym + "'");
            return;
        }
        if (cur.accept_ident("table"))
        {
            DataTable t;
            t.pos = cur.peek().pos;
            t.name = cur.expect_ident("table name");
            cur.expect_punct("{");
            cur.expect_end();
            module_.data_tables.push_back(std::move(t));
            state_ = State::in_table;
            return;
        }

        NativeFunction fn;
        fn.pos = cur.peek().pos;
        fn.is_exported = cur.accept_ident("export");
        if (!cur.accept_ident("fn"))
            cur.fail_expected("'fn', 'table', 'string' or '}'");
        SourcePos name_pos = cur.peek().pos;
        fn.name = cur.expect_ident("function name");
        cur.expect_punct("(");
        if (!cur.accept_punct(")"))
        {
            do
            {
                NativeParam p;
                p.reg = cur.expect_ident("parameter register");
                cur.expect_punct(":");
                SourcePos tag_pos = cur.peek().pos;
                std::string tag = cur.expect_ident("type tag");
                auto t = parse_type_tag(tag);
                if (!t)
                    throw InputError(tag_pos, "unknown type tag '" + tag + "'");
                p.type = *t;
                fn.params.push_back(std::move(p));
            } while (cur.accept_punct(","));
            cur.expect_punct(")");
        }
        cur.expect_punct("{");
        cur.expect_end();
        if (module_.functions.count(fn.name))
            throw InputError(name_pos, "duplicate function '" + fn.name + "'");
        current_fn_ = fn.name;
        module_.functions.emplace(fn.name, std::move(fn));
        state_ = State::in_function;
    }

    Operand parse_operand(TokenCursor &cur, bool ident_is_function)
    {
        const Token &t = cur.peek();
        if (t.kind == TokenKind::string)
            return Operand::make_string(cur.next().text);
        if (t.kind == TokenKind::integer)
            return Operand::make_int(cur.next().value);
        if (cur.accept_punct("@"))
            return Operand::make_symbol(cur.expect_ident("symbol name"));
        if (cur.accept_punct("&"))
            return Operand::make_table(cur.expect_ident("table name"));
        if (cur.accept_punct("?"))
            return Operand::make_hole();
        if (t.kind == TokenKind::ident)
        {
            std::string name = cur.next().text;
            return ident_is_function ? Operand::make_function(std::move(name)) : Operand::make_reg(std::move(name));
        }
        cur.fail_expected("operand");
    }

    void parse_table_row(TokenCursor &cur)
    {
        if (cur.accept_punct("}"))
        {
            cur.expect_end();
            state_ = State::in_module;
            return;
        }
        cur.expect_punct("(");
        std::vector<Operand> row;
        if (!cur.peek_punct(")"))
        {
            do
                row.push_back(parse_operand(cur, true));
            while (cur.accept_punct(","));
        }
        cur.expect_punct(")");
        cur.expect_end();
        module_.data_tables.back().rows.push_back(std::move(row));
    }

    std::vector<Operand> parse_operand_list(TokenCursor &cur)
    {
        std::vector<Operand> ops;
        if (cur.at_end())
            return ops;
        do
            ops.push_back(parse_operand(cur, false));
        while (cur.accept_punct(","));
        return ops;
    }

    void parse_instr(TokenCursor &cur)
    {
        NativeFunction &fn = module_.functions.at(current_fn_);
        if (cur.accept_punct("}"))
        {
            cur.expect_end();
            state_ = State::in_module;
            return;
        }

        NativeInstr ins;
        ins.pos = cur.peek().pos;

        if (cur.peek().kind == TokenKind::ident && cur.peek_punct(":", 1))
        {
            ins.op = Opcode::label;
            ins.target = cur.next().text;
            cur.next();
            cur.expect_end();
            fn.instrs.push_back(std::move(ins));
            return;
        }
        if (cur.peek().kind == TokenKind::ident && cur.peek_punct("=", 1))
        {
            ins.dst = cur.next().text;
            cur.next();
        }

        SourcePos op_pos = cur.peek().pos;
        std::string opname = cur.expect_ident("instruction");
        if (opname == "const-str")
        {
            ins.op = Opcode::const_str;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "const-int")
        {
            ins.op = Opcode::const_int;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "move")
        {
            ins.op = Opcode::move;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "add")
        {
            ins.op = Opcode::add;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "concat")
        {
            ins.op = Opcode::concat;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "load-table-entry")
        {
            ins.op = Opcode::load_table_entry;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "store-table-entry")
        {
            ins.op = Opcode::store_table_entry;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "ret")
        {
            ins.op = Opcode::ret;
            ins.operands = parse_operand_list(cur);
        }
        else if (opname == "goto")
        {
            ins.op = Opcode::go_to;
            ins.target = cur.expect_ident("label");
        }
        else if (opname == "branch-if")
        {
            ins.op = Opcode::branch_if;
            ins.operands.push_back(parse_operand(cur, false));
            const Token &op = cur.peek();
            if (op.kind != TokenKind::punct || !parse_cmp_op(op.text, ins.cmp))
                cur.fail_expected("comparison operator");
            cur.next();
            ins.operands.push_back(parse_operand(cur, false));
            cur.expect_punct(",");
            ins.target = cur.expect_ident("label");
        }
        else if (opname == "call")
        {
            ins.op = Opcode::call;
            ins.target = cur.expect_ident("call target");
            cur.expect_punct("(");
            if (!cur.accept_punct(")"))
            {
                do
                    ins.operands.push_back(parse_operand(cur, false));
                while (cur.accept_punct(","));
                cur.expect_punct(")");
            }
        }
        else if (auto intrinsic = parse_intrinsic(opname))
        {
            ins.op = Opcode::intrinsic;
            ins.intrinsic = *intrinsic;
            cur.expect_punct("(");
            if (!cur.accept_punct(")"))
            {
                do
                    ins.operands.push_back(parse_operand(cur, false));
                while (cur.accept_punct(","));
                cur.expect_punct(")");
            }
        }
        else
            throw InputError(op_pos, "unknown instruction '" + opname + "'");

        cur.expect_end();
        fn.instrs.push_back(std::move(ins));
    }

    NativeModule &module_;
    State state_ = State::top;
    std::string current_fn_;
};

} // namespace

NativeModule parse_native(std::string_view text, const std::string &file)
{
    NativeModule m;
    NativeParser parser(m);
    parser.parse(text, file);
    validate(m);
    return m;
}

std::string print_instr(const NativeInstr &ins)
{
    auto join = [](const std::vector<Operand> &ops, std::size_t from = 0) {
        std::string out;
        for (std::size_t i = from; i < ops.size(); ++i)
            out += (i > from ? ", " : "") + ops[i].render();
        return out;
    };
    std::string prefix = ins.dst.empty() ? "" : ins.dst + " = ";
    switch (ins.op)
    {
    case Opcode::label: return ins.target + ":";
    case Opcode::go_to: return "goto " + ins.target;
    case Opcode::branch_if:
        return "branch-if " + ins.operands[0].render() + " " + to_string(ins.cmp) + " " + ins.operands[1].render() +
               ", " + ins.target;
    case Opcode::call: return prefix + "call " + ins.target + "(" + join(ins.operands) + ")";
    case Opcode::intrinsic: return prefix + std::string(intrinsic_name(ins.intrinsic)) + "(" + join(ins.operands) + ")";
    case Opcode::ret: return ins.operands.empty() ? "ret" : "ret " + join(ins.operands);
    default: return prefix + std::string(opcode_name(ins.op)) + " " + join(ins.operands);
    }
}

std::string print_native(const NativeModule &m)
{
    if (m.name.empty() && m.functions.empty() && m.data_tables.empty() && m.string_pool.empty())
        return {};
    std::ostringstream os;
    os << "module " << quote_string(m.name) << " {\n";
    for (const auto &[sym, value] : m.string_pool)
        os << "    string @" << sym << " = " << quote_string(value) << "\n";
    for (const auto &t : m.data_tables)
    {
        os << "    table " << t.name << " {\n";
        for (const auto &row : t.rows)
        {
            os << "        (";
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? ", " : "") << row[i].render();
            os << ")\n";
        }
        os << "    }\n";
    }
    for (const auto &[name, fn] : m.functions)
    {
        os << "    " << (fn.is_exported ? "export " : "") << "fn " << name << "(";
        for (std::size_t i = 0; i < fn.params.size(); ++i)
            os << (i ? ", " : "") << fn.params[i].reg << ":" << to_string(fn.params[i].type);
        os << ") {\n";
        for (const auto &ins : fn.instrs)
            os << (ins.op == Opcode::label ? "      " : "        ") << print_instr(ins) << "\n";
        os << "    }\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace crosslink::native
