#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crosslink/support/source.hpp"

namespace crosslink::managed {

/// Nominal type name: one of the builtins (int, long, boolean, string, void,
/// object) or a declared class name such as `com.example.MainActivity`.
using TypeName = std::string;

inline constexpr std::string_view kBuiltinTypes[] = {"int", "long", "boolean", "string", "void", "object"};

[[nodiscard]] bool is_builtin_type(std::string_view t);
[[nodiscard]] bool is_primitive_type(std::string_view t);  // int, long, boolean
[[nodiscard]] bool is_reference_type(std::string_view t);  // string, object, classes
[[nodiscard]] bool is_assignable(std::string_view to, std::string_view from);

/// `com.example.Foo` <-> `com/example/Foo`
[[nodiscard]] std::string class_to_internal(std::string_view class_name);
[[nodiscard]] std::string internal_to_class(std::string_view internal);

/// JNI type descriptor: int -> I, string -> Ljava/lang/String;, a.B -> La/B;
[[nodiscard]] std::string type_descriptor(std::string_view t);

/// Parses one descriptor starting at `pos`, advancing it. Returns nullopt on
/// malformed input.
[[nodiscard]] std::optional<TypeName> parse_type_descriptor(std::string_view text, std::size_t &pos);

struct MethodId
{
    std::string class_name;
    std::string method_name;
    std::vector<TypeName> param_types;
    TypeName return_type;

    /// `(<params>)<ret>` in JNI descriptor syntax.
    [[nodiscard]] std::string descriptor() const;
    /// `L<class>;-><name>(<params>)<ret>` with `/`-separated class.
    [[nodiscard]] std::string canonical() const;
    /// Human-oriented `Class.name` form used in DOT labels and tables.
    [[nodiscard]] std::string short_name() const;

    /// Inverse of canonical(); throws InputError at `pos` on malformed text.
    static MethodId parse(std::string_view canonical, const SourcePos &pos = {});

    auto operator<=>(const MethodId &) const = default;
    bool operator==(const MethodId &) const = default;
};

struct Literal
{
    enum class Kind { integer, long_integer, boolean, string, null };
    Kind kind = Kind::integer;
    std::int64_t int_value = 0;
    bool bool_value = false;
    std::string string_value;

    static Literal make_int(std::int64_t v) { return {Kind::integer, v, false, {}}; }
    static Literal make_long(std::int64_t v) { return {Kind::long_integer, v, false, {}}; }
    static Literal make_bool(bool v) { return {Kind::boolean, 0, v, {}}; }
    static Literal make_string(std::string v) { return {Kind::string, 0, false, std::move(v)}; }
    static Literal make_null() { return {Kind::null, 0, false, {}}; }

    /// Whether a literal of this kind may be stored in a local of type `t`.
    [[nodiscard]] bool fits(std::string_view t) const;
    [[nodiscard]] std::string render() const;

    bool operator==(const Literal &) const = default;
};

/// Operand of an if-goto condition.
struct CondOperand
{
    enum class Kind { local, literal, static_field };
    Kind kind = Kind::local;
    std::string name;        // local name, or field name for static_field
    std::string field_class; // declaring class for static_field
    Literal literal;

    [[nodiscard]] std::string render() const;
    bool operator==(const CondOperand &) const = default;
};

enum class StmtKind { assign_const, assign_local, binop, new_instance, invoke, ret, if_goto, go_to, label, nop };
enum class InvokeKind { static_call, virtual_call };

/// Three-address statement. Fields not used by a kind stay empty.
struct Statement
{
    StmtKind kind = StmtKind::nop;

    std::string dst;    // assign targets, new-instance target, invoke result (may be empty)
    std::string src;    // assign-local source, binop lhs, return value (may be empty)
    std::string src2;   // binop rhs
    Literal literal;    // assign-const
    TypeName new_class; // new-instance

    InvokeKind invoke_kind = InvokeKind::static_call;
    std::string receiver;           // virtual invoke receiver local
    MethodId callee;
    std::vector<std::string> args;  // argument locals

    CondOperand lhs;
    CondOperand rhs;
    CmpOp cmp = CmpOp::eq;
    std::string label; // if-goto / goto target, label name

    SourcePos pos;

    static Statement make_assign_const(std::string dst, Literal lit);
    static Statement make_assign_local(std::string dst, std::string src);
    static Statement make_new(std::string dst, TypeName cls);
    static Statement make_invoke(InvokeKind kind, std::string result, std::string receiver, MethodId callee,
                                 std::vector<std::string> args);
    static Statement make_return(std::string value = {});
    static Statement make_if(CondOperand lhs, CmpOp op, CondOperand rhs, std::string target);
    static Statement make_goto(std::string target);
    static Statement make_label(std::string name);

    /// Structural equality; source positions are ignored.
    friend bool operator==(const Statement &a, const Statement &b);
};

struct Local
{
    std::string name;
    TypeName type;
    bool operator==(const Local &) const = default;
};

struct Field
{
    std::string name;
    TypeName type;
    bool is_static = false;
    bool operator==(const Field &) const = default;
};

struct ManagedMethod
{
    MethodId id;
    std::vector<std::string> param_names;
    bool is_static = false;
    bool is_native = false;
    bool is_extern = false;
    std::vector<Local> locals;
    std::vector<Statement> body;
    SourcePos pos;

    [[nodiscard]] bool has_body() const { return !is_native && !is_extern; }
    /// Type of `this`, a parameter, or a declared local.
    [[nodiscard]] std::optional<TypeName> type_of(std::string_view name) const;
    /// Index of `name` among the parameters, or nullopt.
    [[nodiscard]] std::optional<std::size_t> param_index(std::string_view name) const;
    [[nodiscard]] std::optional<std::size_t> label_index(std::string_view name) const;

    friend bool operator==(const ManagedMethod &a, const ManagedMethod &b)
    {
        return a.id == b.id && a.param_names == b.param_names && a.is_static == b.is_static &&
               a.is_native == b.is_native && a.is_extern == b.is_extern && a.locals == b.locals && a.body == b.body;
    }
};

struct ManagedClass
{
    std::string name;
    std::vector<Field> fields;
    std::vector<ManagedMethod> methods;
    SourcePos pos;

    [[nodiscard]] const Field *find_field(std::string_view field_name) const;

    friend bool operator==(const ManagedClass &a, const ManagedClass &b)
    {
        return a.name == b.name && a.fields == b.fields && a.methods == b.methods;
    }
};

struct ManagedProgram
{
    std::map<std::string, ManagedClass> classes;
    std::vector<MethodId> entry_points;
    std::vector<SourcePos> entry_positions; // parallel to entry_points when parsed; not compared

    [[nodiscard]] const ManagedClass *find_class(std::string_view name) const;
    [[nodiscard]] const ManagedMethod *find_method(const MethodId &id) const;
    [[nodiscard]] ManagedMethod *find_method(const MethodId &id);
    /// Methods of `class_name` named `method_name` whose JNI descriptor is
    /// `descriptor`.
    [[nodiscard]] const ManagedMethod *find_by_descriptor(std::string_view class_name, std::string_view method_name,
                                                          std::string_view descriptor) const;
    [[nodiscard]] bool type_exists(std::string_view t) const;

    /// All methods in (class, declaration) order.
    template <typename Fn>
    void for_each_method(Fn &&fn) const
    {
        for (const auto &[name, cls] : classes)
            for (const auto &m : cls.methods)
                fn(cls, m);
    }

    friend bool operator==(const ManagedProgram &a, const ManagedProgram &b)
    {
        return a.classes == b.classes && a.entry_points == b.entry_points;
    }
};

/// Native-flagged methods in deterministic (class, name, descriptor) order.
[[nodiscard]] std::vector<MethodId> list_native_methods(const ManagedProgram &p);

/// Checks every program invariant (type resolution, locals declared before
/// use, operand typing, label resolution, callee resolution, native/extern
/// bodies). Throws InputError on the first violation.
void validate(const ManagedProgram &p);

} // namespace crosslink::managed
