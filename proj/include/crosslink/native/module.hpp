#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crosslink/support/source.hpp"

namespace crosslink::native {

enum class TypeTag { env, object, string, integer, long_integer, boolean };

[[nodiscard]] const char *to_string(TypeTag t);
[[nodiscard]] std::optional<TypeTag> parse_type_tag(std::string_view text);

/// FFI interface functions understood by the executor.
enum class Intrinsic
{
    FindClass,
    GetObjectClass,
    GetMethodID,
    GetStaticMethodID,
    CallObjectMethod,
    CallVoidMethod,
    CallIntMethod,
    CallLongMethod,
    CallBooleanMethod,
    CallStaticObjectMethod,
    CallStaticVoidMethod,
    CallStaticIntMethod,
    CallStaticLongMethod,
    CallStaticBooleanMethod,
    NewObject,
    NewStringUTF,
    GetStringUTFChars,
    RegisterNatives,
};

[[nodiscard]] std::string_view intrinsic_name(Intrinsic i);
[[nodiscard]] std::optional<Intrinsic> parse_intrinsic(std::string_view name);
/// Call<Type>Method / CallStatic<Type>Method, i.e. an exit into managed code.
[[nodiscard]] bool is_method_call(Intrinsic i);
[[nodiscard]] bool is_static_method_call(Intrinsic i);
[[nodiscard]] bool intrinsic_returns_value(Intrinsic i);
/// Fixed operand count; for the call family this is the minimum (env,
/// target, method id) and further operands are forwarded arguments.
[[nodiscard]] std::size_t intrinsic_arity(Intrinsic i);
[[nodiscard]] bool intrinsic_is_variadic(Intrinsic i);

struct Operand
{
    enum class Kind { reg, integer, string, symbol, table, function, hole };
    Kind kind = Kind::reg;
    std::string text;       // register, decoded string, symbol/table/function name
    std::int64_t value = 0; // integer

    static Operand make_reg(std::string r) { return {Kind::reg, std::move(r), 0}; }
    static Operand make_int(std::int64_t v) { return {Kind::integer, {}, v}; }
    static Operand make_string(std::string s) { return {Kind::string, std::move(s), 0}; }
    static Operand make_symbol(std::string s) { return {Kind::symbol, std::move(s), 0}; }
    static Operand make_table(std::string t) { return {Kind::table, std::move(t), 0}; }
    static Operand make_function(std::string f) { return {Kind::function, std::move(f), 0}; }
    static Operand make_hole() { return {Kind::hole, {}, 0}; }

    [[nodiscard]] std::string render() const;
    bool operator==(const Operand &) const = default;
};

enum class Opcode
{
    const_str,
    const_int,
    move,
    add,
    concat,
    load_table_entry,
    store_table_entry,
    call,
    ret,
    branch_if,
    go_to,
    label,
    intrinsic,
};

[[nodiscard]] std::string_view opcode_name(Opcode op);

struct NativeInstr
{
    Opcode op = Opcode::label;
    std::string dst;               // destination register, may be empty
    std::vector<Operand> operands; // opcode-specific
    Intrinsic intrinsic = Intrinsic::FindClass;
    std::string target;            // call: callee function; branch-if/goto/label: label name
    CmpOp cmp = CmpOp::eq;
    SourcePos pos;

    friend bool operator==(const NativeInstr &a, const NativeInstr &b)
    {
        return a.op == b.op && a.dst == b.dst && a.operands == b.operands &&
               (a.op != Opcode::intrinsic || a.intrinsic == b.intrinsic) && a.target == b.target &&
               (a.op != Opcode::branch_if || a.cmp == b.cmp);
    }
};

struct NativeParam
{
    std::string reg;
    TypeTag type = TypeTag::object;
    bool operator==(const NativeParam &) const = default;
};

struct NativeFunction
{
    std::string name;
    std::vector<NativeParam> params;
    std::vector<NativeInstr> instrs;
    bool is_exported = false;
    SourcePos pos;

    [[nodiscard]] std::optional<std::size_t> label_index(std::string_view label) const;

    friend bool operator==(const NativeFunction &a, const NativeFunction &b)
    {
        return a.name == b.name && a.params == b.params && a.instrs == b.instrs && a.is_exported == b.is_exported;
    }
};

/// Static data table. Registration tables have rows of
/// (method name, signature, function); other tables hold arbitrary cells
/// (strings, symbols, integers, `?` holes filled at run time).
struct DataTable
{
    std::string name;
    std::vector<std::vector<Operand>> rows;
    SourcePos pos;

    friend bool operator==(const DataTable &a, const DataTable &b) { return a.name == b.name && a.rows == b.rows; }
};

struct NativeModule
{
    std::string name;
    std::map<std::string, NativeFunction> functions;
    std::vector<DataTable> data_tables;
    std::map<std::string, std::string> string_pool;
    std::string source_file;

    [[nodiscard]] const NativeFunction *find_function(std::string_view fn) const;
    [[nodiscard]] const DataTable *find_table(std::string_view table) const;
    /// Exported functions only: the module's symbol table.
    [[nodiscard]] std::vector<std::string> exported_symbols() const;

    friend bool operator==(const NativeModule &a, const NativeModule &b)
    {
        return a.name == b.name && a.functions == b.functions && a.data_tables == b.data_tables &&
               a.string_pool == b.string_pool;
    }
};

/// Checks module invariants (resolved call targets, labels, intrinsic arity,
/// table references, RegisterNatives row counts). Throws InputError.
void validate(const NativeModule &m);

} // namespace crosslink::native
