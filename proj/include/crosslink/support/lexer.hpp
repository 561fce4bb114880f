#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "crosslink/support/source.hpp"

namespace crosslink {

enum class TokenKind { ident, string, integer, punct, end };

struct Token
{
    TokenKind kind = TokenKind::end;
    std::string text;      // identifier / punctuation / decoded string literal
    std::int64_t value = 0;
    bool long_suffix = false;
    SourcePos pos;
};

/// Splits one source line into tokens. `#` starts a comment outside string
/// literals. Both IR grammars are line oriented; this lexer is shared.
[[nodiscard]] std::vector<Token> tokenize_line(std::string_view line, int line_no, const std::string &file);

/// Sequential reader over a token line with diagnostics naming the expected
/// token.
class TokenCursor
{
public:
    TokenCursor(std::vector<Token> tokens, SourcePos line_pos);

    [[nodiscard]] const Token &peek(std::size_t ahead = 0) const;
    const Token &next();
    [[nodiscard]] bool at_end() const;

    bool accept_punct(std::string_view p);
    bool accept_ident(std::string_view word);
    [[nodiscard]] bool peek_punct(std::string_view p, std::size_t ahead = 0) const;
    [[nodiscard]] bool peek_ident(std::string_view word, std::size_t ahead = 0) const;

    void expect_punct(std::string_view p);
    std::string expect_ident(std::string_view what);
    std::string expect_string(std::string_view what);
    std::int64_t expect_integer(std::string_view what);
    void expect_end();

    [[noreturn]] void fail(const std::string &message) const;
    [[noreturn]] void fail_expected(std::string_view what) const;

private:
    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    Token end_;
};

[[nodiscard]] std::string quote_string(std::string_view raw);

/// Splits a text buffer into lines (without terminators), tolerating CRLF.
[[nodiscard]] std::vector<std::string_view> split_lines(std::string_view text);

} // namespace crosslink
