#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace crosslink {

struct SourcePos
{
    std::string file;
    int line = 0;
    int column = 0;

    [[nodiscard]] std::string str() const;
};

/// Raised for malformed or ill-typed input text. Maps to CLI exit status 2.
class InputError : public std::runtime_error
{
public:
    InputError(SourcePos pos, const std::string &message);

    [[nodiscard]] const SourcePos &pos() const noexcept { return pos_; }
    [[nodiscard]] const std::string &detail() const noexcept { return detail_; }

private:
    SourcePos pos_;
    std::string detail_;
};

/// Raised when well-formed inputs cannot be analyzed consistently
/// (dangling binding endpoints, unknown stub receiver classes, ...).
/// Maps to CLI exit status 1.
class AnalysisError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Severity { note, warning, error };

struct Diagnostic
{
    Severity severity = Severity::warning;
    std::string code;
    std::string message;
    SourcePos pos;
};

[[nodiscard]] const char *to_string(Severity s);

struct SourceFile
{
    std::string name;
    std::string text;
};

enum class CmpOp { eq, ne, lt, le, gt, ge };

[[nodiscard]] const char *to_string(CmpOp op);
[[nodiscard]] bool parse_cmp_op(std::string_view text, CmpOp &out);

template <typename T>
[[nodiscard]] bool compare(CmpOp op, const T &lhs, const T &rhs)
{
    switch (op)
    {
    case CmpOp::eq: return lhs == rhs;
    case CmpOp::ne: return lhs != rhs;
    case CmpOp::lt: return lhs < rhs;
    case CmpOp::le: return lhs <= rhs;
    case CmpOp::gt: return lhs > rhs;
    case CmpOp::ge: return lhs >= rhs;
    }
    return false;
}

} // namespace crosslink
