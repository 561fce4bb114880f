#include "crosslink/bridge/symvalue.hpp"

#include "crosslink/support/lexer.hpp"

namespace crosslink::bridge {

namespace {

std::string opt(const std::optional<std::string> &s)
{
    return s ? quote_string(*s) : "?";
}

} // namespace

std::string SymValue::render() const
{
    switch (kind)
    {
    case Kind::unknown: return "?";
    case Kind::string: return quote_string(text);
    case Kind::integer: return std::to_string(number);
    case Kind::class_handle: return "class(" + opt(class_name) + ")";
    case Kind::object_handle: return "object(" + opt(class_name) + ")";
    case Kind::method_handle:
        return std::string(is_static ? "static-method(" : "method(") + opt(class_name) + ", " + opt(method_name) +
               ", " + opt(signature) + ")";
    case Kind::function_ref: return "fn(" + text + ")";
    }
    return "?";
}

} // namespace crosslink::bridge
