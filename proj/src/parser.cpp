#include "micose/parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace micose {

bool is_compound(StatementKind k) {
    switch (k) {
    case StatementKind::If:
    case StatementKind::ElsifArm:
    case StatementKind::ElseArm:
    case StatementKind::Case:
    case StatementKind::CaseArm:
    case StatementKind::For:
    case StatementKind::While:
    case StatementKind::Repeat:
        return true;
    default:
        return false;
    }
}

std::string_view to_string(PouKind k) {
    switch (k) {
    case PouKind::PRG: return "PRG";
    case PouKind::FC: return "FC";
    case PouKind::FB: return "FB";
    }
    return "?";
}

std::string_view to_string(DeclSection s) {
    switch (s) {
    case DeclSection::VarInput: return "VAR_INPUT";
    case DeclSection::VarOutput: return "VAR_OUTPUT";
    case DeclSection::VarInOut: return "VAR_IN_OUT";
    case DeclSection::Var: return "VAR";
    case DeclSection::VarGlobalRef: return "VAR_GLOBAL";
    case DeclSection::Constant: return "CONSTANT";
    }
    return "?";
}

std::string_view to_string(StatementKind k) {
    switch (k) {
    case StatementKind::Assign: return "Assign";
    case StatementKind::If: return "If";
    case StatementKind::ElsifArm: return "Elsif-arm";
    case StatementKind::ElseArm: return "Else-arm";
    case StatementKind::Case: return "Case";
    case StatementKind::CaseArm: return "Case-arm";
    case StatementKind::For: return "For";
    case StatementKind::While: return "While";
    case StatementKind::Repeat: return "Repeat";
    case StatementKind::Call: return "Call";
    case StatementKind::Exit: return "Exit";
    case StatementKind::Return: return "Return";
    case StatementKind::Empty: return "Empty";
    }
    return "?";
}

bool Statement::deep_equal(const Statement& other) const {
    if (kind != other.kind || tokens.size() != other.tokens.size() ||
        children.size() != other.children.size())
        return false;
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (tokens[i].kind != other.tokens[i].kind || tokens[i].text != other.tokens[i].text)
            return false;
    for (std::size_t i = 0; i < children.size(); ++i)
        if (!children[i].deep_equal(other.children[i])) return false;
    return true;
}

int count_sloc(std::string_view text) {
    int sloc = 0;
    bool line_has_code = false;
    int block_depth = 0;
    bool in_line_comment = false;
    char in_string = '\0';

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        char n = i + 1 < text.size() ? text[i + 1] : '\0';

        if (c == '\n') {
            if (line_has_code) ++sloc;
            line_has_code = false;
            in_line_comment = false;
            continue;
        }
        if (in_line_comment) continue;
        if (in_string) {
            line_has_code = true;
            if (c == '$') { ++i; continue; }
            if (c == in_string) in_string = '\0';
            continue;
        }
        if (block_depth > 0) {
            if (c == '*' && n == ')') { --block_depth; ++i; }
            else if (c == '(' && n == '*') { ++block_depth; ++i; }
            continue;
        }
        if (c == '(' && n == '*') { ++block_depth; ++i; continue; }
        if (c == '/' && n == '/') { in_line_comment = true; ++i; continue; }
        if (c == '\'' || c == '"') { in_string = c; line_has_code = true; continue; }
        if (!std::isspace(static_cast<unsigned char>(c))) line_has_code = true;
    }
    if (line_has_code) ++sloc;
    return sloc;
}

namespace {

bool is_pou_header(std::string_view word) {
    return word == "PROGRAM" || word == "FUNCTION_BLOCK" || word == "FUNCTION";
}

std::string_view end_keyword(std::string_view header) {
    if (header == "PROGRAM") return "END_PROGRAM";
    if (header == "FUNCTION_BLOCK") return "END_FUNCTION_BLOCK";
    return "END_FUNCTION";
}

std::string join_tokens(const std::vector<Token>& toks) {
    std::string out;
    for (const auto& t : toks) {
        if (!out.empty()) out += ' ';
        out += t.text;
    }
    return out;
}

class PouParser {
public:
    PouParser(std::vector<Token> tokens, std::string_view text)
        : toks_(std::move(tokens)), text_(text) {}

    Pou parse() {
        Pou pou;
        pou.sloc = count_sloc(text_);

        int headers = 0;
        for (const auto& t : toks_)
            if (t.kind == TokenKind::Keyword && is_pou_header(t.text)) ++headers;
        if (headers == 0) throw ParseError("no POU header (PROGRAM/FUNCTION/FUNCTION_BLOCK) found");
        if (headers > 1) throw MultiPouError("source contains multiple POUs; split first");

        while (!at(TokenKind::Keyword) || !is_pou_header(cur().text)) advance();
        std::string header = cur().text;
        pou.kind = header == "PROGRAM" ? PouKind::PRG
                 : header == "FUNCTION" ? PouKind::FC
                                        : PouKind::FB;
        advance();
        if (at(TokenKind::Identifier)) {
            pou.name = cur().text;
            advance();
        } else {
            diag("expected POU name after header");
        }
        // FUNCTION return type
        if (at(TokenKind::Colon)) {
            advance();
            skip_type();
        }

        while (at(TokenKind::Keyword) && cur().text.rfind("VAR", 0) == 0)
            parse_section(pou);

        std::size_t body_begin = pos_;
        std::string_view endkw = end_keyword(header);
        while (!done() && !(at(TokenKind::Keyword) && cur().text == endkw)) {
            if (auto st = parse_statement(endkw)) pou.body.push_back(std::move(*st));
        }
        std::size_t body_end = pos_;
        if (done()) diag(std::string("missing ") + std::string(endkw));

        pou.body_tokens.assign(toks_.begin() + static_cast<long>(body_begin),
                               toks_.begin() + static_cast<long>(body_end));
        set_depths(pou.body, 0);
        pou.diagnostics = std::move(diags_);
        return pou;
    }

private:
    std::vector<Token> toks_;
    std::string_view text_;
    std::size_t pos_ = 0;
    std::vector<Diagnostic> diags_;

    bool done() const { return pos_ >= toks_.size(); }
    const Token& cur() const { return toks_[pos_]; }
    bool at(TokenKind k) const { return !done() && cur().kind == k; }
    bool at_kw(std::string_view w) const {
        return at(TokenKind::Keyword) && cur().text == w;
    }
    void advance() { if (!done()) ++pos_; }
    int line() const { return done() ? (toks_.empty() ? 0 : toks_.back().line) : cur().line; }
    void diag(std::string msg) { diags_.push_back({line(), std::move(msg)}); }

    static void set_depths(std::vector<Statement>& stmts, int depth) {
        for (auto& s : stmts) {
            s.depth = depth;
            set_depths(s.children, depth + 1);
        }
    }

    bool at_end_like() const {
        if (!at(TokenKind::Keyword)) return false;
        const std::string& w = cur().text;
        return w.rfind("END_", 0) == 0 || w == "ELSE" || w == "ELSIF" || w == "UNTIL";
    }

    // Skip to the next ';' (consumed) or a statement-closing keyword (left).
    void recover() {
        while (!done()) {
            if (at(TokenKind::Semicolon)) { advance(); return; }
            if (at_end_like()) return;
            advance();
        }
    }

    void skip_type() { parse_type_text(); }

    std::string parse_type_text() {
        std::vector<Token> acc;
        if (at_kw("ARRAY")) {
            acc.push_back(cur());
            advance();
            if (at(TokenKind::LBracket)) {
                int depth = 0;
                do {
                    if (at(TokenKind::LBracket)) ++depth;
                    if (at(TokenKind::RBracket)) --depth;
                    acc.push_back(cur());
                    advance();
                } while (!done() && depth > 0);
            }
            if (at_kw("OF")) { acc.push_back(cur()); advance(); }
        }
        if (at(TokenKind::Identifier) || at(TokenKind::Keyword)) {
            acc.push_back(cur());
            advance();
            // STRING(80) style size argument
            if (at(TokenKind::LParen) || at(TokenKind::LBracket)) {
                TokenKind close = at(TokenKind::LParen) ? TokenKind::RParen : TokenKind::RBracket;
                acc.push_back(cur());
                advance();
                while (!done() && !at(close)) { acc.push_back(cur()); advance(); }
                if (at(close)) { acc.push_back(cur()); advance(); }
            }
        }
        return join_tokens(acc);
    }

    void parse_section(Pou& pou) {
        std::string kw = cur().text;
        advance();
        DeclSection section = DeclSection::Var;
        if (kw == "VAR_INPUT") section = DeclSection::VarInput;
        else if (kw == "VAR_OUTPUT") section = DeclSection::VarOutput;
        else if (kw == "VAR_IN_OUT") section = DeclSection::VarInOut;
        else if (kw == "VAR_GLOBAL" || kw == "VAR_EXTERNAL") section = DeclSection::VarGlobalRef;

        // qualifiers
        while (at(TokenKind::Keyword) &&
               (cur().text == "CONSTANT" || cur().text == "RETAIN" ||
                cur().text == "NON_RETAIN" || cur().text == "PERSISTENT")) {
            if (cur().text == "CONSTANT" && section == DeclSection::Var)
                section = DeclSection::Constant;
            advance();
        }

        while (!done() && !at_kw("END_VAR")) {
            if (!at(TokenKind::Identifier)) {
                diag("expected declaration name");
                while (!done() && !at(TokenKind::Semicolon) && !at_kw("END_VAR")) advance();
                if (at(TokenKind::Semicolon)) advance();
                continue;
            }
            std::vector<std::pair<std::string, int>> names;
            names.emplace_back(cur().text, cur().line);
            advance();
            while (at(TokenKind::Comma)) {
                advance();
                if (at(TokenKind::Identifier)) {
                    names.emplace_back(cur().text, cur().line);
                    advance();
                }
            }
            if (at_kw("AT")) { // direct address binding
                advance();
                if (at(TokenKind::Identifier)) advance();
            }
            if (!at(TokenKind::Colon)) {
                diag("expected ':' in declaration");
                while (!done() && !at(TokenKind::Semicolon) && !at_kw("END_VAR")) advance();
                if (at(TokenKind::Semicolon)) advance();
                continue;
            }
            advance();
            std::string type = parse_type_text();
            std::string init;
            if (at(TokenKind::Operator) && cur().text == ":=") {
                advance();
                std::vector<Token> acc;
                while (!done() && !at(TokenKind::Semicolon) && !at_kw("END_VAR")) {
                    acc.push_back(cur());
                    advance();
                }
                init = join_tokens(acc);
            }
            if (at(TokenKind::Semicolon)) advance();
            else diag("expected ';' after declaration");
            for (auto& [name, ln] : names)
                pou.interface.push_back(Declaration{name, section, type, init, ln});
        }
        if (at_kw("END_VAR")) advance();
        else diag("missing END_VAR");
    }

    std::vector<Token> collect_until_kw(std::initializer_list<std::string_view> stops) {
        std::vector<Token> acc;
        while (!done()) {
            if (at(TokenKind::Keyword)) {
                for (auto s : stops)
                    if (cur().text == s) return acc;
                if (cur().text.rfind("END_", 0) == 0) return acc;
            }
            acc.push_back(cur());
            advance();
        }
        return acc;
    }

    std::vector<Statement> parse_block(std::string_view pou_end,
                                       std::initializer_list<std::string_view> stops) {
        std::vector<Statement> out;
        while (!done()) {
            if (at(TokenKind::Keyword)) {
                const std::string& w = cur().text;
                bool stop = w == pou_end;
                for (auto s : stops) stop = stop || w == s;
                if (stop) break;
                if (w.rfind("END_", 0) == 0) break; // stray END_*, let caller handle
            }
            if (auto st = parse_statement(pou_end)) out.push_back(std::move(*st));
        }
        return out;
    }

    // True when the upcoming tokens form a CASE arm label (tokens then ':').
    bool ahead_is_case_label() const {
        for (std::size_t i = pos_; i < toks_.size(); ++i) {
            const Token& t = toks_[i];
            if (t.kind == TokenKind::Colon) return true;
            if (t.kind == TokenKind::Semicolon) return false;
            if (t.kind == TokenKind::Operator && t.text == ":=") return false;
            if (t.kind == TokenKind::Keyword) return false;
        }
        return false;
    }

    std::optional<Statement> parse_statement(std::string_view pou_end) {
        if (done()) return std::nullopt;
        int ln = line();

        if (at(TokenKind::Semicolon)) {
            advance();
            return Statement{StatementKind::Empty, {}, {}, 0, ln};
        }

        if (at(TokenKind::Keyword)) {
            const std::string w = cur().text;

            if (w == "IF") return parse_if(pou_end, ln);
            if (w == "CASE") return parse_case(pou_end, ln);
            if (w == "FOR") return parse_loop(StatementKind::For, "DO", "END_FOR", pou_end, ln);
            if (w == "WHILE") return parse_loop(StatementKind::While, "DO", "END_WHILE", pou_end, ln);
            if (w == "REPEAT") return parse_repeat(pou_end, ln);
            if (w == "EXIT" || w == "RETURN" || w == "CONTINUE") {
                advance();
                if (at(TokenKind::Semicolon)) advance();
                return Statement{w == "EXIT" ? StatementKind::Exit : StatementKind::Return,
                                 {}, {}, 0, ln};
            }
            // METHOD/ACTION blocks are tokenized but not modeled
            if (w == "METHOD" || w == "ACTION") {
                std::string end = "END_" + w;
                while (!done() && !at_kw(end)) advance();
                if (!done()) advance();
                return std::nullopt;
            }
            diag("unexpected keyword '" + w + "'");
            advance();
            return std::nullopt;
        }

        // assignment or call statement
        std::vector<Token> acc;
        bool has_assign = false;
        int paren_depth = 0;
        while (!done() && !at(TokenKind::Semicolon)) {
            if (at_end_like() || (at(TokenKind::Keyword) && cur().text == pou_end)) {
                diag("expected ';' before '" + cur().text + "'");
                break;
            }
            if (at(TokenKind::LParen) || at(TokenKind::LBracket)) ++paren_depth;
            if (at(TokenKind::RParen) || at(TokenKind::RBracket)) --paren_depth;
            // ':=' inside parens is a named call parameter, not an assignment;
            // a leading ':=' has no target and stays unrecognized
            if (at(TokenKind::Operator) && cur().text == ":=" && paren_depth == 0 &&
                !acc.empty())
                has_assign = true;
            acc.push_back(cur());
            advance();
        }
        if (at(TokenKind::Semicolon)) advance();
        if (acc.empty()) return std::nullopt;

        StatementKind kind;
        if (has_assign) {
            kind = StatementKind::Assign;
        } else if (acc.front().kind == TokenKind::Identifier && acc.size() >= 2 &&
                   acc[1].kind == TokenKind::LParen) {
            kind = StatementKind::Call;
        } else {
            diag("unrecognized statement");
            return std::nullopt;
        }
        return Statement{kind, std::move(acc), {}, 0, ln};
    }

    Statement parse_if(std::string_view pou_end, int ln) {
        advance(); // IF
        Statement st{StatementKind::If, {}, {}, 0, ln};
        st.tokens = collect_until_kw({"THEN"});
        if (at_kw("THEN")) advance();
        else diag("expected THEN");
        st.children = parse_block(pou_end, {"ELSIF", "ELSE", "END_IF"});
        while (at_kw("ELSIF")) {
            int eln = line();
            advance();
            Statement arm{StatementKind::ElsifArm, {}, {}, 0, eln};
            arm.tokens = collect_until_kw({"THEN"});
            if (at_kw("THEN")) advance();
            else diag("expected THEN");
            arm.children = parse_block(pou_end, {"ELSIF", "ELSE", "END_IF"});
            st.children.push_back(std::move(arm));
        }
        if (at_kw("ELSE")) {
            int eln = line();
            advance();
            Statement arm{StatementKind::ElseArm, {}, {}, 0, eln};
            arm.children = parse_block(pou_end, {"END_IF"});
            st.children.push_back(std::move(arm));
        }
        if (at_kw("END_IF")) advance();
        else { diag("missing END_IF"); recover(); }
        if (at(TokenKind::Semicolon)) advance();
        return st;
    }

    Statement parse_case(std::string_view pou_end, int ln) {
        advance(); // CASE
        Statement st{StatementKind::Case, {}, {}, 0, ln};
        st.tokens = collect_until_kw({"OF"});
        if (at_kw("OF")) advance();
        else diag("expected OF");
        while (!done() && !at_kw("ELSE") && !at_kw("END_CASE") && !at_kw(pou_end)) {
            if (!ahead_is_case_label()) {
                diag("expected CASE arm label");
                recover();
                continue;
            }
            int aln = line();
            Statement arm{StatementKind::CaseArm, {}, {}, 0, aln};
            while (!done() && !at(TokenKind::Colon)) {
                arm.tokens.push_back(cur());
                advance();
            }
            if (at(TokenKind::Colon)) advance();
            while (!done() && !at_kw("ELSE") && !at_kw("END_CASE") && !at_kw(pou_end) &&
                   !ahead_is_case_label()) {
                if (auto s = parse_statement(pou_end)) arm.children.push_back(std::move(*s));
                else if (at_end_like() || at_kw(pou_end)) break;
            }
            st.children.push_back(std::move(arm));
        }
        if (at_kw("ELSE")) {
            int eln = line();
            advance();
            Statement arm{StatementKind::ElseArm, {}, {}, 0, eln};
            arm.children = parse_block(pou_end, {"END_CASE"});
            st.children.push_back(std::move(arm));
        }
        if (at_kw("END_CASE")) advance();
        else { diag("missing END_CASE"); recover(); }
        if (at(TokenKind::Semicolon)) advance();
        return st;
    }

    Statement parse_loop(StatementKind kind, std::string_view head_end,
                         std::string_view block_end, std::string_view pou_end, int ln) {
        advance(); // FOR / WHILE
        Statement st{kind, {}, {}, 0, ln};
        st.tokens = collect_until_kw({head_end});
        if (at_kw(head_end)) advance();
        else diag(std::string("expected ") + std::string(head_end));
        st.children = parse_block(pou_end, {block_end});
        if (at_kw(block_end)) advance();
        else { diag(std::string("missing ") + std::string(block_end)); recover(); }
        if (at(TokenKind::Semicolon)) advance();
        return st;
    }

    Statement parse_repeat(std::string_view pou_end, int ln) {
        advance(); // REPEAT
        Statement st{StatementKind::Repeat, {}, {}, 0, ln};
        st.children = parse_block(pou_end, {"UNTIL"});
        if (at_kw("UNTIL")) advance();
        else diag("expected UNTIL");
        st.tokens = collect_until_kw({"END_REPEAT"});
        if (at_kw("END_REPEAT")) advance();
        else { diag("missing END_REPEAT"); recover(); }
        if (at(TokenKind::Semicolon)) advance();
        return st;
    }
};

} // namespace

Pou parse_pou(std::string_view text) {
    PouParser parser(tokenize(text), text);
    return parser.parse();
}

std::vector<std::string> split_pous(std::string_view text) {
    std::vector<std::string> chunks;
    std::size_t i = 0;
    int block_depth = 0;
    bool in_line_comment = false;
    char in_string = '\0';
    std::size_t chunk_start = std::string_view::npos;
    std::string pending_end;

    auto word_at = [&](std::size_t& j) {
        std::size_t from = j;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
            ++j;
        std::string w(text.substr(from, j - from));
        std::transform(w.begin(), w.end(), w.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        return w;
    };

    while (i < text.size()) {
        char c = text[i];
        char n = i + 1 < text.size() ? text[i + 1] : '\0';
        if (c == '\n') { in_line_comment = false; ++i; continue; }
        if (in_line_comment) { ++i; continue; }
        if (in_string) {
            if (c == '$') { i += 2; continue; }
            if (c == in_string) in_string = '\0';
            ++i;
            continue;
        }
        if (block_depth > 0) {
            if (c == '*' && n == ')') { --block_depth; i += 2; }
            else if (c == '(' && n == '*') { ++block_depth; i += 2; }
            else ++i;
            continue;
        }
        if (c == '(' && n == '*') { block_depth = 1; i += 2; continue; }
        if (c == '/' && n == '/') { in_line_comment = true; i += 2; continue; }
        if (c == '\'' || c == '"') { in_string = c; ++i; continue; }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t word_begin = i;
            std::size_t j = i;
            std::string w = word_at(j);
            if (chunk_start == std::string_view::npos && is_pou_header(w)) {
                chunk_start = word_begin;
                pending_end = end_keyword(w);
            } else if (chunk_start != std::string_view::npos && w == pending_end) {
                chunks.emplace_back(text.substr(chunk_start, j - chunk_start));
                chunk_start = std::string_view::npos;
            }
            i = j;
            continue;
        }
        ++i;
    }
    // unterminated trailing POU: keep it, the parser reports the diagnostic
    if (chunk_start != std::string_view::npos)
        chunks.emplace_back(text.substr(chunk_start));
    return chunks;
}

} // namespace micose
