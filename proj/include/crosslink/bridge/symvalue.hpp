#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace crosslink::bridge {

/// Abstract value held by a native register during symbolic execution.
/// Class names are kept in JNI internal form (`com/example/Foo`). A handle
/// component that could not be folded to a constant is nullopt.
struct SymValue
{
    enum class Kind { unknown, string, integer, class_handle, method_handle, object_handle, function_ref };

    Kind kind = Kind::unknown;
    std::string text;                       // string value or function name
    std::int64_t number = 0;                // integer value
    std::optional<std::string> class_name;  // class/object/method handles
    std::optional<std::string> method_name; // method handle
    std::optional<std::string> signature;   // method handle
    bool is_static = false;                 // method handle

    static SymValue unknown() { return {}; }
    static SymValue str(std::string s)
    {
        SymValue v;
        v.kind = Kind::string;
        v.text = std::move(s);
        return v;
    }
    static SymValue integer(std::int64_t n)
    {
        SymValue v;
        v.kind = Kind::integer;
        v.number = n;
        return v;
    }
    static SymValue class_handle(std::optional<std::string> cls)
    {
        SymValue v;
        v.kind = Kind::class_handle;
        v.class_name = std::move(cls);
        return v;
    }
    static SymValue object_handle(std::optional<std::string> cls)
    {
        SymValue v;
        v.kind = Kind::object_handle;
        v.class_name = std::move(cls);
        return v;
    }
    static SymValue method_handle(std::optional<std::string> cls, std::optional<std::string> name,
                                  std::optional<std::string> sig, bool is_static)
    {
        SymValue v;
        v.kind = Kind::method_handle;
        v.class_name = std::move(cls);
        v.method_name = std::move(name);
        v.signature = std::move(sig);
        v.is_static = is_static;
        return v;
    }
    static SymValue function_ref(std::string fn)
    {
        SymValue v;
        v.kind = Kind::function_ref;
        v.text = std::move(fn);
        return v;
    }

    [[nodiscard]] bool is_string() const { return kind == Kind::string; }
    [[nodiscard]] bool is_integer() const { return kind == Kind::integer; }
    [[nodiscard]] bool is_concrete_method() const
    {
        return kind == Kind::method_handle && class_name && method_name && signature;
    }

    [[nodiscard]] std::string render() const;

    bool operator==(const SymValue &) const = default;
};

} // namespace crosslink::bridge
