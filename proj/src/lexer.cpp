#include "micose/token.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

namespace micose {

namespace {

const std::unordered_set<std::string_view>& keyword_set() {
    static const std::unordered_set<std::string_view> kw = {
        "PROGRAM", "END_PROGRAM", "FUNCTION", "END_FUNCTION",
        "FUNCTION_BLOCK", "END_FUNCTION_BLOCK",
        "METHOD", "END_METHOD", "ACTION", "END_ACTION",
        "VAR", "VAR_INPUT", "VAR_OUTPUT", "VAR_IN_OUT", "VAR_GLOBAL",
        "VAR_EXTERNAL", "VAR_TEMP", "VAR_ACCESS", "END_VAR",
        "CONSTANT", "RETAIN", "NON_RETAIN", "PERSISTENT", "AT",
        "IF", "THEN", "ELSIF", "ELSE", "END_IF",
        "CASE", "OF", "END_CASE",
        "FOR", "TO", "BY", "DO", "END_FOR",
        "WHILE", "END_WHILE",
        "REPEAT", "UNTIL", "END_REPEAT",
        "EXIT", "RETURN", "CONTINUE",
        "TYPE", "END_TYPE", "STRUCT", "END_STRUCT", "ARRAY",
        "MOD", "AND", "OR", "XOR", "NOT",
    };
    return kw;
}

// Prefixes that make an IDENT#... literal a duration/date/time literal.
const std::unordered_set<std::string_view>& time_prefixes() {
    static const std::unordered_set<std::string_view> p = {
        "T", "TIME", "LT", "LTIME", "D", "DATE", "LD", "LDATE",
        "TOD", "TIME_OF_DAY", "LTOD", "DT", "DATE_AND_TIME", "LDT",
    };
    return p;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    bool done() const { return pos_ >= text_.size(); }
    char peek(std::size_t off = 0) const {
        return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
    }
    char take() {
        char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }
    int line() const { return line_; }
    std::size_t pos() const { return pos_; }
    std::string_view slice(std::size_t from) const { return text_.substr(from, pos_ - from); }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

} // namespace

bool is_keyword(std::string_view u) { return keyword_set().count(u) != 0; }

bool is_tracked_operator(const Token& t) {
    if (t.kind != TokenKind::Operator) return false;
    static const std::unordered_set<std::string_view> ops = {
        ":=", "+", "-", "*", "/", "MOD", "**",
        "=", "<>", "<", "<=", ">", ">=",
        "AND", "OR", "XOR", "NOT", "&",
    };
    return ops.count(t.text) != 0;
}

std::string_view literal_class(const Token& t) {
    switch (t.kind) {
    case TokenKind::NumberLiteral: return "numeric";
    case TokenKind::TimeLiteral: return "time";
    case TokenKind::StringLiteral: return "string";
    case TokenKind::BoolLiteral: return "boolean";
    default: return {};
    }
}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    Cursor cur(text);

    auto push = [&](TokenKind k, std::string t, int line) {
        out.push_back(Token{k, std::move(t), line});
    };

    while (!cur.done()) {
        char c = cur.peek();

        if (std::isspace(static_cast<unsigned char>(c))) {
            cur.take();
            continue;
        }

        // (* block comment *)
        if (c == '(' && cur.peek(1) == '*') {
            int start = cur.line();
            cur.take();
            cur.take();
            int depth = 1;
            while (depth > 0) {
                if (cur.done()) throw LexicalError("unterminated comment", start);
                if (cur.peek() == '*' && cur.peek(1) == ')') {
                    cur.take();
                    cur.take();
                    --depth;
                } else if (cur.peek() == '(' && cur.peek(1) == '*') {
                    cur.take();
                    cur.take();
                    ++depth;
                } else {
                    cur.take();
                }
            }
            continue;
        }

        // // line comment
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.done() && cur.peek() != '\n') cur.take();
            continue;
        }

        // vendor pragma, treated as trivia
        if (c == '{') {
            int start = cur.line();
            cur.take();
            while (cur.peek() != '}') {
                if (cur.done()) throw LexicalError("unterminated pragma", start);
                cur.take();
            }
            cur.take();
            continue;
        }

        int line = cur.line();

        if (ident_start(c)) {
            std::size_t from = cur.pos();
            while (!cur.done() && ident_cont(cur.peek())) cur.take();
            std::string word = upper(cur.slice(from));

            // IDENT# introduces a typed or time literal: T#5s, INT#7, BOOL#TRUE
            if (cur.peek() == '#') {
                cur.take();
                std::size_t lfrom = cur.pos();
                while (!cur.done() &&
                       (ident_cont(cur.peek()) || cur.peek() == '.' ||
                        cur.peek() == '_' || cur.peek() == '+' || cur.peek() == '-')) {
                    // sign only allowed immediately after '#'
                    if ((cur.peek() == '+' || cur.peek() == '-') && cur.pos() != lfrom) break;
                    cur.take();
                }
                std::string value = upper(cur.slice(lfrom));
                std::string full = word + "#" + value;
                if (time_prefixes().count(word)) {
                    push(TokenKind::TimeLiteral, std::move(full), line);
                } else if (word == "BOOL") {
                    push(TokenKind::BoolLiteral, std::move(full), line);
                } else {
                    push(TokenKind::NumberLiteral, std::move(full), line);
                }
                continue;
            }

            if (word == "TRUE" || word == "FALSE") {
                push(TokenKind::BoolLiteral, std::move(word), line);
            } else if (word == "MOD" || word == "AND" || word == "OR" ||
                       word == "XOR" || word == "NOT") {
                push(TokenKind::Operator, std::move(word), line);
            } else if (is_keyword(word)) {
                push(TokenKind::Keyword, std::move(word), line);
            } else {
                push(TokenKind::Identifier, std::move(word), line);
            }
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t from = cur.pos();
            while (!cur.done() && (ident_cont(cur.peek()) || cur.peek() == '#')) cur.take();
            // fractional part / exponent, but not the '..' range operator
            if (cur.peek() == '.' && cur.peek(1) != '.' &&
                std::isdigit(static_cast<unsigned char>(cur.peek(1)))) {
                cur.take();
                while (!cur.done() && ident_cont(cur.peek())) cur.take();
                if ((cur.peek() == '+' || cur.peek() == '-') &&
                    (cur.slice(from).back() == 'E' || cur.slice(from).back() == 'e')) {
                    cur.take();
                    while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
                        cur.take();
                }
            }
            push(TokenKind::NumberLiteral, upper(cur.slice(from)), line);
            continue;
        }

        if (c == '\'' || c == '"') {
            char quote = cur.take();
            std::size_t from = cur.pos();
            while (cur.peek() != quote) {
                if (cur.done() || cur.peek() == '\n')
                    throw LexicalError("unterminated string literal", line);
                if (cur.peek() == '$') cur.take(); // escape prefix
                if (cur.done()) throw LexicalError("unterminated string literal", line);
                cur.take();
            }
            std::string body(cur.slice(from));
            cur.take();
            push(TokenKind::StringLiteral, std::move(body), line);
            continue;
        }

        // punctuation and operator symbols
        cur.take();
        switch (c) {
        case '(': push(TokenKind::LParen, "(", line); break;
        case ')': push(TokenKind::RParen, ")", line); break;
        case '[': push(TokenKind::LBracket, "[", line); break;
        case ']': push(TokenKind::RBracket, "]", line); break;
        case ';': push(TokenKind::Semicolon, ";", line); break;
        case ',': push(TokenKind::Comma, ",", line); break;
        case '&': push(TokenKind::Operator, "&", line); break;
        case '+': push(TokenKind::Operator, "+", line); break;
        case '-': push(TokenKind::Operator, "-", line); break;
        case '/': push(TokenKind::Operator, "/", line); break;
        case '.':
            if (cur.peek() == '.') {
                cur.take();
                push(TokenKind::Range, "..", line);
            } else {
                push(TokenKind::Dot, ".", line);
            }
            break;
        case '*':
            if (cur.peek() == '*') {
                cur.take();
                push(TokenKind::Operator, "**", line);
            } else {
                push(TokenKind::Operator, "*", line);
            }
            break;
        case ':':
            if (cur.peek() == '=') {
                cur.take();
                push(TokenKind::Operator, ":=", line);
            } else {
                push(TokenKind::Colon, ":", line);
            }
            break;
        case '=':
            if (cur.peek() == '>') {
                cur.take();
                push(TokenKind::Operator, "=>", line);
            } else {
                push(TokenKind::Operator, "=", line);
            }
            break;
        case '<':
            if (cur.peek() == '=') {
                cur.take();
                push(TokenKind::Operator, "<=", line);
            } else if (cur.peek() == '>') {
                cur.take();
                push(TokenKind::Operator, "<>", line);
            } else {
                push(TokenKind::Operator, "<", line);
            }
            break;
        case '>':
            if (cur.peek() == '=') {
                cur.take();
                push(TokenKind::Operator, ">=", line);
            } else {
                push(TokenKind::Operator, ">", line);
            }
            break;
        case '%': {
            // direct address: %IX0.1, %QW4 — keep as one identifier-like token
            std::size_t from = cur.pos();
            while (!cur.done() && (ident_cont(cur.peek()) || cur.peek() == '.')) cur.take();
            push(TokenKind::Identifier, "%" + upper(cur.slice(from)), line);
            break;
        }
        default:
            throw LexicalError(std::string("unexpected character '") + c + "'", line);
        }
    }
    return out;
}

} // namespace micose
