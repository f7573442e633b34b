#include "micose/inventory.hpp"

#include <unordered_set>

namespace micose {

int ItemInventory::total_calls() const {
    int n = 0;
    for (const auto& [_, c] : calls_by_callee) n += c;
    return n;
}

int ItemInventory::total_operators() const {
    int n = 0;
    for (const auto& [_, c] : operators) n += c;
    return n;
}

bool is_elementary_type(std::string_view datatype) {
    static const std::unordered_set<std::string_view> elementary = {
        "BOOL", "BYTE", "WORD", "DWORD", "LWORD",
        "SINT", "INT", "DINT", "LINT", "USINT", "UINT", "UDINT", "ULINT",
        "REAL", "LREAL",
        "TIME", "LTIME", "DATE", "LDATE", "TOD", "TIME_OF_DAY", "DT",
        "DATE_AND_TIME", "STRING", "WSTRING", "CHAR", "WCHAR",
    };
    // ARRAY [..] OF T and STRING(n) are elementary if their base is
    std::string_view base = datatype;
    if (auto of = base.rfind(" OF "); of != std::string_view::npos)
        base = base.substr(of + 4);
    if (auto paren = base.find_first_of("(["); paren != std::string_view::npos)
        base = base.substr(0, paren);
    while (!base.empty() && base.back() == ' ') base.remove_suffix(1);
    return elementary.count(base) != 0;
}

namespace {

void count_statements(const std::vector<Statement>& stmts, ItemInventory& inv) {
    for (const auto& s : stmts) {
        if (s.kind != StatementKind::Empty) ++inv.statements[s.kind];
        count_statements(s.children, inv);
    }
}

void scan_tokens(const std::vector<Token>& toks, ItemInventory& inv) {
    enum class Frame { Call, Group, Bracket };
    struct CallFrame {
        Frame type;
        int commas = 0;
        bool any = false;
    };
    std::vector<CallFrame> stack;

    for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& t = toks[i];

        if (t.kind == TokenKind::LParen) {
            bool is_call = i > 0 && toks[i - 1].kind == TokenKind::Identifier;
            if (is_call) {
                ++inv.calls_by_callee[toks[i - 1].text];
                stack.push_back({Frame::Call});
            } else {
                ++inv.grouping_parens;
                stack.push_back({Frame::Group});
            }
            continue;
        }
        if (t.kind == TokenKind::LBracket) {
            stack.push_back({Frame::Bracket});
            continue;
        }
        if (t.kind == TokenKind::RParen || t.kind == TokenKind::RBracket) {
            if (!stack.empty()) {
                if (stack.back().type == Frame::Call)
                    inv.call_arguments += stack.back().any ? stack.back().commas + 1 : 0;
                stack.pop_back();
            }
            continue;
        }
        if (!stack.empty()) {
            if (t.kind == TokenKind::Comma && stack.back().type == Frame::Call) {
                ++stack.back().commas;
                continue;
            }
            stack.back().any = true;
        }
        if (is_tracked_operator(t)) {
            ++inv.operators[t.text];
        } else if (auto cls = literal_class(t); !cls.empty()) {
            ++inv.literals[std::string(cls)];
        }
    }
}

} // namespace

ItemInventory extract_inventory(const Pou& pou) {
    ItemInventory inv;
    for (const auto& d : pou.interface) {
        ++inv.declarations[d.section];
        if (d.section == DeclSection::Var || d.section == DeclSection::Constant) {
            if (is_elementary_type(d.datatype)) {
                ++inv.internal_vars;
                if (!d.initializer.empty()) ++inv.initialized_internal_vars;
            } else {
                ++inv.fb_instances;
            }
        }
    }
    count_statements(pou.body, inv);
    scan_tokens(pou.body_tokens, inv);
    return inv;
}

} // namespace micose
