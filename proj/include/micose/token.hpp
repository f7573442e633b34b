#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace micose {

enum class TokenKind : std::uint8_t {
    Identifier,
    Keyword,
    NumberLiteral,
    TimeLiteral,
    StringLiteral,
    BoolLiteral,
    Operator,   // :=, +, -, *, /, **, =, <>, <, <=, >, >=, &, =>, MOD, AND, OR, XOR, NOT
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semicolon,
    Comma,
    Colon,
    Dot,
    Range,      // .. in CASE labels and ARRAY bounds
};

struct Token {
    TokenKind kind;
    std::string text;   // normalized: uppercased except string literals
    int line = 0;
};

class LexicalError : public std::runtime_error {
public:
    LexicalError(const std::string& what, int line)
        : std::runtime_error(what), line(line) {}
    int line;
};

/// Tokenizes ST source text. Comments ((* *), //) and vendor pragmas ({ })
/// are consumed as trivia. Throws LexicalError on unterminated comments
/// or strings.
std::vector<Token> tokenize(std::string_view text);

bool is_keyword(std::string_view upper);

/// True for the operator symbols tracked per-symbol by the change catalog
/// (:=, arithmetic, comparison, logical). "=>" is lexed as an operator but
/// is not a tracked symbol.
bool is_tracked_operator(const Token& t);

/// Literal class name for inventory bucketing: numeric, time, string, boolean.
std::string_view literal_class(const Token& t);

} // namespace micose
