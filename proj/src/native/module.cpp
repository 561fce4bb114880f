#include "crosslink/native/module.hpp"

#include <array>
#include <set>
#include <utility>

#include "crosslink/support/lexer.hpp"

namespace crosslink::native {

namespace {

constexpr std::array<std::pair<Intrinsic, std::string_view>, 18> kIntrinsicNames{{
    {Intrinsic::FindClass, "FindClass"},
    {Intrinsic::GetObjectClass, "GetObjectClass"},
    {Intrinsic::GetMethodID, "GetMethodID"},
    {Intrinsic::GetStaticMethodID, "GetStaticMethodID"},
    {Intrinsic::CallObjectMethod, "CallObjectMethod"},
    {Intrinsic::CallVoidMethod, "CallVoidMethod"},
    {Intrinsic::CallIntMethod, "CallIntMethod"},
    {Intrinsic::CallLongMethod, "CallLongMethod"},
    {Intrinsic::CallBooleanMethod, "CallBooleanMethod"},
    {Intrinsic::CallStaticObjectMethod, "CallStaticObjectMethod"},
    {Intrinsic::CallStaticVoidMethod, "CallStaticVoidMethod"},
    {Intrinsic::CallStaticIntMethod, "CallStaticIntMethod"},
    {Intrinsic::CallStaticLongMethod, "CallStaticLongMethod"},
    {Intrinsic::CallStaticBooleanMethod, "CallStaticBooleanMethod"},
    {Intrinsic::NewObject, "NewObject"},
    {Intrinsic::NewStringUTF, "NewStringUTF"},
    {Intrinsic::GetStringUTFChars, "GetStringUTFChars"},
    {Intrinsic::RegisterNatives, "RegisterNatives"},
}};

} // namespace

const char *to_string(TypeTag t)
{
    switch (t)
    {
    case TypeTag::env: return "env";
    case TypeTag::object: return "object";
    case TypeTag::string: return "string";
    case TypeTag::integer: return "int";
    case TypeTag::long_integer: return "long";
    case TypeTag::boolean: return "boolean";
    }
    return "?";
}

std::optional<TypeTag> parse_type_tag(std::string_view text)
{
    if (text == "env") return TypeTag::env;
    if (text == "object") return TypeTag::object;
    if (text == "string") return TypeTag::string;
    if (text == "int") return TypeTag::integer;
    if (text == "long") return TypeTag::long_integer;
    if (text == "boolean") return TypeTag::boolean;
    return std::nullopt;
}

std::string_view intrinsic_name(Intrinsic i)
{
    for (const auto &[k, name] : kIntrinsicNames)
        if (k == i)
            return name;
    return "?";
}

std::optional<Intrinsic> parse_intrinsic(std::string_view name)
{
    for (const auto &[k, n] : kIntrinsicNames)
        if (n == name)
            return k;
    return std::nullopt;
}

bool is_method_call(Intrinsic i)
{
    switch (i)
    {
    case Intrinsic::CallObjectMethod:
    case Intrinsic::CallVoidMethod:
    case Intrinsic::CallIntMethod:
    case Intrinsic::CallLongMethod:
    case Intrinsic::CallBooleanMethod: return true;
    default: return is_static_method_call(i);
    }
}

bool is_static_method_call(Intrinsic i)
{
    switch (i)
    {
    case Intrinsic::CallStaticObjectMethod:
    case Intrinsic::CallStaticVoidMethod:
    case Intrinsic::CallStaticIntMethod:
    case Intrinsic::CallStaticLongMethod:
    case Intrinsic::CallStaticBooleanMethod: return true;
    default: return false;
    }
}

bool intrinsic_returns_value(Intrinsic i)
{
    return i != Intrinsic::CallVoidMethod && i != Intrinsic::CallStaticVoidMethod;
}

std::size_t intrinsic_arity(Intrinsic i)
{
    switch (i)
    {
    case Intrinsic::FindClass:
    case Intrinsic::GetObjectClass:
    case Intrinsic::NewStringUTF:
    case Intrinsic::GetStringUTFChars: return 2;
    case Intrinsic::GetMethodID:
    case Intrinsic::GetStaticMethodID:
    case Intrinsic::RegisterNatives: return 4;
    default: return 3;
    }
}

bool intrinsic_is_variadic(Intrinsic i) { return is_method_call(i) || i == Intrinsic::NewObject; }

std::string Operand::render() const
{
    switch (kind)
    {
    case Kind::reg:
    case Kind::function: return text;
    case Kind::integer: return std::to_string(value);
    case Kind::string: return quote_string(text);
    case Kind::symbol: return "@" + text;
    case Kind::table: return "&" + text;
    case Kind::hole: return "?";
    }
    return "?";
}

std::string_view opcode_name(Opcode op)
{
    switch (op)
    {
    case Opcode::const_str: return "const-str";
    case Opcode::const_int: return "const-int";
    case Opcode::move: return "move";
    case Opcode::add: return "add";
    case Opcode::concat: return "concat";
    case Opcode::load_table_entry: return "load-table-entry";
    case Opcode::store_table_entry: return "store-table-entry";
    case Opcode::call: return "call";
    case Opcode::ret: return "ret";
    case Opcode::branch_if: return "branch-if";
    case Opcode::go_to: return "goto";
    case Opcode::label: return "label";
    case Opcode::intrinsic: return "intrinsic";
    }
    return "?";
}

std::optional<std::size_t> NativeFunction::label_index(std::string_view label) const
{
    for (std::size_t i = 0; i < instrs.size(); ++i)
        if (instrs[i].op == Opcode::label && instrs[i].target == label)
            return i;
    return std::nullopt;
}

const NativeFunction *NativeModule::find_function(std::string_view fn) const
{
    auto it = functions.find(std::string(fn));
    return it == functions.end() ? nullptr : &it->second;
}

const DataTable *NativeModule::find_table(std::string_view table) const
{
    for (const auto &t : data_tables)
        if (t.name == table)
            return &t;
    return nullptr;
}

std::vector<std::string> NativeModule::exported_symbols() const
{
    std::vector<std::string> out;
    for (const auto &[name, fn] : functions)
        if (fn.is_exported)
            out.push_back(name);
    return out;
}

namespace {

using Kind = Operand::Kind;

void require_kind(const NativeInstr &ins, std::size_t index, std::initializer_list<Kind> allowed, std::string_view what)
{
    const Operand &op = ins.operands[index];
    for (Kind k : allowed)
        if (op.kind == k)
            return;
    throw InputError(ins.pos, std::string(opcode_name(ins.op) == "intrinsic" ? intrinsic_name(ins.intrinsic)
                                                                              : opcode_name(ins.op)) +
                                  ": operand " + std::to_string(index + 1) + " must be " + std::string(what) +
                                  ", found '" + op.render() + "'");
}

void require_count(const NativeInstr &ins, std::size_t n, bool at_least = false)
{
    std::size_t have = ins.operands.size();
    if (at_least ? have < n : have != n)
    {
        std::string name(ins.op == Opcode::intrinsic ? intrinsic_name(ins.intrinsic) : opcode_name(ins.op));
        throw InputError(ins.pos, name + " takes " + (at_least ? "at least " : "") + std::to_string(n) +
                                      " operand(s), found " + std::to_string(have));
    }
}

void require_dst(const NativeInstr &ins, bool required)
{
    std::string name(ins.op == Opcode::intrinsic ? intrinsic_name(ins.intrinsic) : opcode_name(ins.op));
    if (required && ins.dst.empty())
        throw InputError(ins.pos, name + " needs a destination register");
    if (!required && !ins.dst.empty())
        throw InputError(ins.pos, name + " produces no value");
}

void check_operand_refs(const NativeModule &m, const NativeInstr &ins)
{
    for (const auto &op : ins.operands)
    {
        if (op.kind == Kind::symbol && !m.string_pool.count(op.text))
            throw InputError(ins.pos, "unknown string symbol '@" + op.text + "'");
        if (op.kind == Kind::table && !m.find_table(op.text))
            throw InputError(ins.pos, "unknown table '&" + op.text + "'");
    }
}

void check_instr(const NativeModule &m, const NativeFunction &fn, const NativeInstr &ins)
{
    check_operand_refs(m, ins);
    switch (ins.op)
    {
    case Opcode::const_str:
        require_count(ins, 1);
        require_kind(ins, 0, {Kind::string, Kind::symbol}, "a string or symbol");
        require_dst(ins, true);
        break;
    case Opcode::const_int:
        require_count(ins, 1);
        require_kind(ins, 0, {Kind::integer}, "an integer");
        require_dst(ins, true);
        break;
    case Opcode::move:
        require_count(ins, 1);
        require_kind(ins, 0, {Kind::reg}, "a register");
        require_dst(ins, true);
        break;
    case Opcode::add:
        require_count(ins, 2);
        require_kind(ins, 0, {Kind::reg, Kind::integer}, "a register or integer");
        require_kind(ins, 1, {Kind::reg, Kind::integer}, "a register or integer");
        require_dst(ins, true);
        break;
    case Opcode::concat:
        require_count(ins, 2);
        require_kind(ins, 0, {Kind::reg, Kind::string}, "a register or string");
        require_kind(ins, 1, {Kind::reg, Kind::string}, "a register or string");
        require_dst(ins, true);
        break;
    case Opcode::load_table_entry:
        require_count(ins, 3);
        require_kind(ins, 0, {Kind::table}, "a table reference");
        require_kind(ins, 1, {Kind::reg, Kind::integer}, "a row index");
        require_kind(ins, 2, {Kind::reg, Kind::integer}, "a column index");
        require_dst(ins, true);
        break;
    case Opcode::store_table_entry:
        require_count(ins, 4);
        require_kind(ins, 0, {Kind::table}, "a table reference");
        require_kind(ins, 1, {Kind::reg, Kind::integer}, "a row index");
        require_kind(ins, 2, {Kind::reg, Kind::integer}, "a column index");
        require_kind(ins, 3, {Kind::reg, Kind::string, Kind::integer}, "a value");
        require_dst(ins, false);
        break;
    case Opcode::call: {
        const NativeFunction *callee = m.find_function(ins.target);
        if (!callee)
            throw InputError(ins.pos, "unresolved call target '" + ins.target + "' in " + fn.name);
        if (callee->params.size() != ins.operands.size())
            throw InputError(ins.pos, "call to '" + ins.target + "' passes " + std::to_string(ins.operands.size()) +
                                          " argument(s), expected " + std::to_string(callee->params.size()));
        for (std::size_t i = 0; i < ins.operands.size(); ++i)
            require_kind(ins, i, {Kind::reg, Kind::integer, Kind::string}, "a register or literal");
        break;
    }
    case Opcode::ret:
        if (ins.operands.size() > 1)
            throw InputError(ins.pos, "ret takes at most one operand");
        if (!ins.operands.empty())
            require_kind(ins, 0, {Kind::reg}, "a register");
        require_dst(ins, false);
        break;
    case Opcode::branch_if:
        require_count(ins, 2);
        require_kind(ins, 0, {Kind::reg}, "a register");
        require_kind(ins, 1, {Kind::reg, Kind::integer, Kind::string}, "a register or literal");
        [[fallthrough]];
    case Opcode::go_to:
        if (!fn.label_index(ins.target))
            throw InputError(ins.pos, "branch target '" + ins.target + "' is not a label in " + fn.name);
        break;
    case Opcode::label: break;
    case Opcode::intrinsic: {
        std::size_t arity = intrinsic_arity(ins.intrinsic);
        require_count(ins, arity, intrinsic_is_variadic(ins.intrinsic));
        require_kind(ins, 0, {Kind::reg}, "the env register");
        if (!intrinsic_returns_value(ins.intrinsic))
            require_dst(ins, false);
        if (ins.intrinsic == Intrinsic::RegisterNatives)
        {
            require_kind(ins, 1, {Kind::reg}, "a class register");
            require_kind(ins, 2, {Kind::table}, "a table reference");
            require_kind(ins, 3, {Kind::integer}, "a method count");
            const DataTable *t = m.find_table(ins.operands[2].text);
            if (static_cast<std::int64_t>(t->rows.size()) != ins.operands[3].value)
                throw InputError(ins.pos, "RegisterNatives count " + std::to_string(ins.operands[3].value) +
                                              " does not match the " + std::to_string(t->rows.size()) +
                                              " row(s) of table '" + t->name + "'");
            for (const auto &row : t->rows)
            {
                if (row.size() != 3)
                    throw InputError(t->pos, "registration table '" + t->name + "' needs rows of 3 cells");
                if (row[2].kind != Kind::function)
                    throw InputError(t->pos, "registration table '" + t->name + "' row must end with a function");
            }
        }
        else
        {
            for (std::size_t i = 1; i < ins.operands.size(); ++i)
                require_kind(ins, i, {Kind::reg}, "a register");
        }
        break;
    }
    }
}

} // namespace

void validate(const NativeModule &m)
{
    std::set<std::string> table_names;
    for (const auto &t : m.data_tables)
    {
        if (!table_names.insert(t.name).second)
            throw InputError(t.pos, "duplicate table '" + t.name + "'");
        for (const auto &row : t.rows)
        {
            if (row.empty())
                throw InputError(t.pos, "empty row in table '" + t.name + "'");
            for (const auto &cell : row)
            {
                if (cell.kind == Kind::function && !m.find_function(cell.text))
                    throw InputError(t.pos, "table '" + t.name + "' references unknown function '" + cell.text + "'");
                if (cell.kind == Kind::symbol && !m.string_pool.count(cell.text))
                    throw InputError(t.pos, "table '" + t.name + "' references unknown symbol '@" + cell.text + "'");
                if (cell.kind == Kind::reg || cell.kind == Kind::table)
                    throw InputError(t.pos, "malformed cell '" + cell.render() + "' in table '" + t.name + "'");
            }
        }
    }
    for (const auto &[name, fn] : m.functions)
    {
        std::set<std::string> regs;
        for (const auto &p : fn.params)
            if (!regs.insert(p.reg).second)
                throw InputError(fn.pos, "duplicate parameter register '" + p.reg + "' in " + name);
        std::set<std::string> labels;
        for (const auto &ins : fn.instrs)
            if (ins.op == Opcode::label && !labels.insert(ins.target).second)
                throw InputError(ins.pos, "duplicate label '" + ins.target + "' in " + name);
        for (const auto &ins : fn.instrs)
            check_instr(m, fn, ins);
    }
}

} // namespace crosslink::native
