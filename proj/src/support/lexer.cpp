#include "crosslink/support/lexer.hpp"

#include <cctype>

namespace crosslink {

std::string SourcePos::str() const
{
    std::string out = file.empty() ? std::string("<input>") : file;
    if (line == 0)
        return out;
    out += ':';
    out += std::to_string(line);
    out += ':';
    out += std::to_string(column);
    return out;
}

InputError::InputError(SourcePos pos, const std::string &message)
    : std::runtime_error(pos.str() + ": " + message), pos_(std::move(pos)), detail_(message)
{}

const char *to_string(Severity s)
{
    switch (s)
    {
    case Severity::note: return "note";
    case Severity::warning: return "warning";
    case Severity::error: return "error";
    }
    return "?";
}

const char *to_string(CmpOp op)
{
    switch (op)
    {
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
    }
    return "?";
}

bool parse_cmp_op(std::string_view text, CmpOp &out)
{
    if (text == "==") out = CmpOp::eq;
    else if (text == "!=") out = CmpOp::ne;
    else if (text == "<") out = CmpOp::lt;
    else if (text == "<=") out = CmpOp::le;
    else if (text == ">") out = CmpOp::gt;
    else if (text == ">=") out = CmpOp::ge;
    else return false;
    return true;
}

namespace {

bool ident_start(char c)
{
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool ident_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '.';
}

// `<init>` style special method names
std::size_t angle_ident_length(std::string_view line, std::size_t i)
{
    if (line[i] != '<')
        return 0;
    std::size_t j = i + 1;
    while (j < line.size() && std::islower(static_cast<unsigned char>(line[j])))
        ++j;
    if (j > i + 1 && j < line.size() && line[j] == '>')
        return j - i + 1;
    return 0;
}

} // namespace

std::vector<Token> tokenize_line(std::string_view line, int line_no, const std::string &file)
{
    std::vector<Token> out;
    std::size_t i = 0;
    auto pos_at = [&](std::size_t col) { return SourcePos{file, line_no, static_cast<int>(col) + 1}; };

    while (i < line.size())
    {
        char c = line[i];
        if (std::isspace(static_cast<unsigned char>(c)))
        {
            ++i;
            continue;
        }
        if (c == '#')
            break;

        Token tok;
        tok.pos = pos_at(i);

        if (c == '"')
        {
            std::string value;
            ++i;
            bool closed = false;
            while (i < line.size())
            {
                char d = line[i++];
                if (d == '"')
                {
                    closed = true;
                    break;
                }
                if (d == '\\')
                {
                    if (i >= line.size())
                        break;
                    char e = line[i++];
                    switch (e)
                    {
                    case 'n': value += '\n'; break;
                    case 't': value += '\t'; break;
                    case '\\': value += '\\'; break;
                    case '"': value += '"'; break;
                    default: throw InputError(pos_at(i - 1), std::string("unknown escape '\\") + e + "'");
                    }
                    continue;
                }
                value += d;
            }
            if (!closed)
                throw InputError(tok.pos, "unterminated string literal");
            tok.kind = TokenKind::string;
            tok.text = std::move(value);
            out.push_back(std::move(tok));
            continue;
        }

        bool negative_number = c == '-' && i + 1 < line.size() && std::isdigit(static_cast<unsigned char>(line[i + 1]));
        if (std::isdigit(static_cast<unsigned char>(c)) || negative_number)
        {
            std::size_t start = i;
            if (negative_number)
                ++i;
            while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i])))
                ++i;
            tok.kind = TokenKind::integer;
            tok.text = std::string(line.substr(start, i - start));
            try
            {
                tok.value = std::stoll(tok.text);
            }
            catch (const std::exception &)
            {
                throw InputError(tok.pos, "integer literal out of range");
            }
            if (i < line.size() && line[i] == 'L')
            {
                tok.long_suffix = true;
                ++i;
            }
            if (i < line.size() && ident_char(line[i]))
                throw InputError(pos_at(i), "malformed integer literal");
            out.push_back(std::move(tok));
            continue;
        }

        if (std::size_t n = angle_ident_length(line, i); n > 0)
        {
            tok.kind = TokenKind::ident;
            tok.text = std::string(line.substr(i, n));
            i += n;
            out.push_back(std::move(tok));
            continue;
        }

        if (ident_start(c))
        {
            std::size_t start = i;
            while (i < line.size())
            {
                if (ident_char(line[i]))
                {
                    ++i;
                    continue;
                }
                // hyphenated opcodes such as const-str
                if (line[i] == '-' && i + 1 < line.size() && std::isalpha(static_cast<unsigned char>(line[i + 1])))
                {
                    ++i;
                    continue;
                }
                // qualified special names such as Foo.<init>
                if (line[i] == '<' && i > start && line[i - 1] == '.')
                {
                    if (std::size_t n = angle_ident_length(line, i); n > 0)
                    {
                        i += n;
                        continue;
                    }
                }
                break;
            }
            tok.kind = TokenKind::ident;
            tok.text = std::string(line.substr(start, i - start));
            out.push_back(std::move(tok));
            continue;
        }

        static constexpr std::string_view two_char[] = {"==", "!=", "<=", ">=", "->"};
        bool matched = false;
        for (std::string_view p : two_char)
        {
            if (line.substr(i, 2) == p)
            {
                tok.kind = TokenKind::punct;
                tok.text = std::string(p);
                i += 2;
                matched = true;
                break;
            }
        }
        if (!matched)
        {
            static constexpr std::string_view one_char = "{}(),=:;+<>@&?!";
            if (one_char.find(c) == std::string_view::npos)
                throw InputError(tok.pos, std::string("unexpected character '") + c + "'");
            tok.kind = TokenKind::punct;
            tok.text = std::string(1, c);
            ++i;
        }
        out.push_back(std::move(tok));
    }
    return out;
}

TokenCursor::TokenCursor(std::vector<Token> tokens, SourcePos line_pos)
    : tokens_(std::move(tokens))
{
    end_.kind = TokenKind::end;
    end_.pos = line_pos;
    if (!tokens_.empty())
    {
        end_.pos = tokens_.back().pos;
        end_.pos.column += static_cast<int>(tokens_.back().text.size());
    }
}

const Token &TokenCursor::peek(std::size_t ahead) const
{
    return index_ + ahead < tokens_.size() ? tokens_[index_ + ahead] : end_;
}

const Token &TokenCursor::next()
{
    const Token &t = peek();
    if (index_ < tokens_.size())
        ++index_;
    return t;
}

bool TokenCursor::at_end() const { return index_ >= tokens_.size(); }

bool TokenCursor::peek_punct(std::string_view p, std::size_t ahead) const
{
    const Token &t = peek(ahead);
    return t.kind == TokenKind::punct && t.text == p;
}

bool TokenCursor::peek_ident(std::string_view word, std::size_t ahead) const
{
    const Token &t = peek(ahead);
    return t.kind == TokenKind::ident && t.text == word;
}

bool TokenCursor::accept_punct(std::string_view p)
{
    if (!peek_punct(p))
        return false;
    next();
    return true;
}

bool TokenCursor::accept_ident(std::string_view word)
{
    if (!peek_ident(word))
        return false;
    next();
    return true;
}

void TokenCursor::expect_punct(std::string_view p)
{
    if (!accept_punct(p))
        fail_expected(std::string("'") + std::string(p) + "'");
}

std::string TokenCursor::expect_ident(std::string_view what)
{
    if (peek().kind != TokenKind::ident)
        fail_expected(what);
    return next().text;
}

std::string TokenCursor::expect_string(std::string_view what)
{
    if (peek().kind != TokenKind::string)
        fail_expected(what);
    return next().text;
}

std::int64_t TokenCursor::expect_integer(std::string_view what)
{
    if (peek().kind != TokenKind::integer)
        fail_expected(what);
    return next().value;
}

void TokenCursor::expect_end()
{
    if (!at_end())
        fail("unexpected trailing token '" + peek().text + "'");
}

void TokenCursor::fail(const std::string &message) const
{
    throw InputError(peek().pos, message);
}

void TokenCursor::fail_expected(std::string_view what) const
{
    const Token &t = peek();
    std::string found = t.kind == TokenKind::end ? std::string("end of line") : "'" + t.text + "'";
    throw InputError(t.pos, "expected " + std::string(what) + ", found " + found);
}

std::string quote_string(std::string_view raw)
{
    std::string out = "\"";
    for (char c : raw)
    {
        switch (c)
        {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size())
    {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
        {
            if (start < text.size())
                lines.push_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

} // namespace crosslink
