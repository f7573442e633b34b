#include "micose/diff.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace micose {

namespace {

// Indices of LCS-matched element pairs.
template <typename T, typename Eq>
std::vector<std::pair<std::size_t, std::size_t>>
lcs_pairs(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = m; j-- > 0;)
            dp[i][j] = eq(a[i], b[j]) ? dp[i + 1][j + 1] + 1
                                      : std::max(dp[i + 1][j], dp[i][j + 1]);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (eq(a[i], b[j])) {
            out.emplace_back(i, j);
            ++i;
            ++j;
        } else if (dp[i + 1][j] >= dp[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

bool token_eq(const Token& x, const Token& y) {
    return x.kind == y.kind && x.text == y.text;
}

void align_block(const std::vector<Statement>& before, const std::vector<Statement>& after,
                 Alignment& out) {
    auto matches = lcs_pairs(before, after,
                             [](const Statement& x, const Statement& y) { return x.deep_equal(y); });

    std::size_t bi = 0, ai = 0, mi = 0;
    while (bi < before.size() || ai < after.size()) {
        std::size_t mb = mi < matches.size() ? matches[mi].first : before.size();
        std::size_t ma = mi < matches.size() ? matches[mi].second : after.size();

        // gap before the next match: pair same-kind statements in order
        std::vector<const Statement*> gap_before, gap_after;
        for (; bi < mb; ++bi) gap_before.push_back(&before[bi]);
        for (; ai < ma; ++ai) gap_after.push_back(&after[ai]);

        std::vector<bool> used(gap_before.size(), false);
        for (const Statement* a : gap_after) {
            bool paired = false;
            for (std::size_t k = 0; k < gap_before.size(); ++k) {
                if (!used[k] && gap_before[k]->kind == a->kind) {
                    used[k] = true;
                    out.modified.emplace_back(gap_before[k], a);
                    ++out.stats.matched_modified;
                    if (is_compound(a->kind))
                        align_block(gap_before[k]->children, a->children, out);
                    paired = true;
                    break;
                }
            }
            if (!paired) {
                out.added.push_back(a);
                ++out.stats.added;
            }
        }
        for (std::size_t k = 0; k < gap_before.size(); ++k)
            if (!used[k]) {
                out.removed.push_back(gap_before[k]);
                ++out.stats.removed;
            }

        if (mi < matches.size()) {
            ++out.stats.matched_equal;
            ++bi;
            ++ai;
            ++mi;
        }
    }
}

// Term id fragment for structural add/remove events; empty when the kind
// carries no term of its own.
std::string stmt_term_key(StatementKind k) {
    switch (k) {
    case StatementKind::If: return "if";
    case StatementKind::ElsifArm: return "elsif";
    case StatementKind::Case: return "case";
    case StatementKind::CaseArm: return "case-arm";
    case StatementKind::For: return "for";
    case StatementKind::While: return "while";
    case StatementKind::Repeat: return "repeat";
    case StatementKind::ElseArm: return "else-arm";
    case StatementKind::Exit: return "exit";
    case StatementKind::Return: return "return";
    default: return {};
    }
}

const std::map<std::string, std::string>& op_term_ids() {
    static const std::map<std::string, std::string> ids = {
        {":=", "op-assign-changed"}, {"+", "op-plus-changed"}, {"-", "op-minus-changed"},
        {"*", "op-times-changed"}, {"/", "op-divide-changed"}, {"MOD", "op-mod-changed"},
        {"**", "op-power-changed"}, {"=", "op-eq-changed"}, {"<>", "op-neq-changed"},
        {"<", "op-lt-changed"}, {"<=", "op-le-changed"}, {">", "op-gt-changed"},
        {">=", "op-ge-changed"}, {"AND", "op-and-changed"}, {"OR", "op-or-changed"},
        {"XOR", "op-xor-changed"}, {"NOT", "op-not-changed"}, {"&", "op-amp-changed"},
    };
    return ids;
}

struct TokenStats {
    std::map<std::string, int> operators;
    std::map<std::string, int> literals;
    int grouping_parens = 0;
    int call_arguments = 0;
};

TokenStats token_stats(const std::vector<Token>& toks) {
    // reuse the inventory token scan through a throwaway POU body
    Pou tmp;
    tmp.body_tokens = toks;
    ItemInventory inv = extract_inventory(tmp);
    return {inv.operators, inv.literals, inv.grouping_parens, inv.call_arguments};
}

class Counter {
public:
    explicit Counter(std::map<std::string, int>& events) : events_(events) {}

    void bump(const std::string& term_id, int n = 1) {
        if (n > 0) events_[term_id] += n;
    }

    // Operator/literal occurrences of a wholly added or removed token list.
    void tokens_one_sided(const std::vector<Token>& toks, bool added) {
        TokenStats ts = token_stats(toks);
        for (const auto& [sym, n] : ts.operators) bump(op_term_ids().at(sym), n);
        for (const auto& [cls, n] : ts.literals) bump("literal-" + cls + "-changed", n);
        bump(added ? "paren-added" : "paren-removed", ts.grouping_parens);
        bump(added ? "call-argument-added" : "call-argument-removed", ts.call_arguments);
    }

    void subtree_one_sided(const Statement& st, bool added) {
        std::string key = stmt_term_key(st.kind);
        if (!key.empty()) bump(key + (added ? "-added" : "-removed"));
        tokens_one_sided(st.tokens, added);
        for (const auto& c : st.children) subtree_one_sided(c, added);
    }

    // Matched-modified pair: token-level diff of the own tokens, once per
    // differing token occurrence.
    void modified_pair(const Statement& before, const Statement& after) {
        auto matches = lcs_pairs(before.tokens, after.tokens, token_eq);
        std::vector<bool> bm(before.tokens.size(), false), am(after.tokens.size(), false);
        for (auto [i, j] : matches) {
            bm[i] = true;
            am[j] = true;
        }

        bool any_diff = false;
        auto side = [&](const std::vector<Token>& toks, const std::vector<bool>& matched,
                        bool is_after) {
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (matched[i]) continue;
                any_diff = true;
                const Token& t = toks[i];
                if (is_tracked_operator(t)) {
                    bump(op_term_ids().at(t.text));
                } else if (auto cls = literal_class(t); !cls.empty()) {
                    bump("literal-" + std::string(cls) + "-changed");
                } else if (t.kind == TokenKind::LParen) {
                    bool call_paren = i > 0 && toks[i - 1].kind == TokenKind::Identifier;
                    if (!call_paren) bump(is_after ? "paren-added" : "paren-removed");
                }
            }
        };
        side(before.tokens, bm, false);
        side(after.tokens, am, true);

        if (any_diff && is_compound(before.kind)) {
            std::string key = stmt_term_key(before.kind);
            if (key != "case-arm" && key != "else-arm" && !key.empty())
                bump(key + "-condition-modified");
        }

        if (before.kind == StatementKind::Call) {
            TokenStats tb = token_stats(before.tokens);
            TokenStats ta = token_stats(after.tokens);
            if (ta.call_arguments > tb.call_arguments)
                bump("call-argument-added", ta.call_arguments - tb.call_arguments);
            else if (ta.call_arguments < tb.call_arguments)
                bump("call-argument-removed", tb.call_arguments - ta.call_arguments);
            else if (any_diff)
                bump("call-argument-modified");
        }
    }

private:
    std::map<std::string, int>& events_;
};

std::string decl_term_base(const Declaration& d) {
    switch (d.section) {
    case DeclSection::VarInput: return "input-variable";
    case DeclSection::VarOutput: return "output-variable";
    case DeclSection::VarInOut: return "inout-variable";
    default:
        return is_elementary_type(d.datatype) ? "internal-variable" : "fb-instance";
    }
}

bool is_interface_section(DeclSection s) {
    return s == DeclSection::VarInput || s == DeclSection::VarOutput ||
           s == DeclSection::VarInOut;
}

void diff_declarations(const Pou& before, const Pou& after, Counter& counter) {
    auto key = [](const Declaration& d) { return std::make_pair(d.section, d.name); };
    std::map<std::pair<DeclSection, std::string>, const Declaration*> bmap, amap;
    for (const auto& d : before.interface) bmap[key(d)] = &d;
    for (const auto& d : after.interface) amap[key(d)] = &d;

    for (const auto& [k, bd] : bmap) {
        auto it = amap.find(k);
        if (it == amap.end()) {
            counter.bump(decl_term_base(*bd) + "-removed");
            continue;
        }
        const Declaration* ad = it->second;
        if (bd->datatype != ad->datatype) {
            if (is_interface_section(bd->section)) {
                counter.bump(decl_term_base(*bd) + "-retyped");
            } else {
                // internal retype counts as remove + add
                counter.bump(decl_term_base(*bd) + "-removed");
                counter.bump(decl_term_base(*ad) + "-added");
            }
        } else if (bd->initializer != ad->initializer &&
                   !is_interface_section(bd->section) &&
                   is_elementary_type(bd->datatype)) {
            counter.bump("internal-variable-initializer-changed");
        }
    }
    for (const auto& [k, ad] : amap)
        if (!bmap.count(k)) counter.bump(decl_term_base(*ad) + "-added");
}

void diff_callees(const ItemInventory& before, const ItemInventory& after, Counter& counter) {
    for (const auto& [callee, _] : after.calls_by_callee)
        if (!before.calls_by_callee.count(callee)) counter.bump("callee-introduced");
    for (const auto& [callee, _] : before.calls_by_callee)
        if (!after.calls_by_callee.count(callee)) counter.bump("callee-removed");
}

} // namespace

Alignment align_statements(const Pou& before, const Pou& after) {
    Alignment out;
    align_block(before.body, after.body, out);
    return out;
}

double change_ratio(const TermChangeCount& count) {
    if (count.changed <= 0) return 0.0;
    return static_cast<double>(count.changed) /
           static_cast<double>(std::max(count.before_total, count.changed));
}

int matcher_count(const ChangeTerm& term, const ItemInventory& inv) {
    const std::string& m = term.matcher;
    auto get = [](const auto& map, const auto& key) {
        auto it = map.find(key);
        return it == map.end() ? 0 : it->second;
    };
    if (m == "decl:VAR_INPUT") return get(inv.declarations, DeclSection::VarInput);
    if (m == "decl:VAR_OUTPUT") return get(inv.declarations, DeclSection::VarOutput);
    if (m == "decl:VAR_IN_OUT") return get(inv.declarations, DeclSection::VarInOut);
    if (m == "decl:internal") return inv.internal_vars;
    if (m == "decl:fb-instance") return inv.fb_instances;
    if (m == "decl:initializer") return inv.initialized_internal_vars;
    if (m == "callee") return inv.distinct_callees();
    if (m == "call-arg") return inv.call_arguments;
    if (m == "paren") return inv.grouping_parens;
    if (m.rfind("stmt:", 0) == 0) {
        std::string_view name = std::string_view(m).substr(5);
        for (int k = 0; k <= static_cast<int>(StatementKind::Empty); ++k)
            if (to_string(static_cast<StatementKind>(k)) == name)
                return get(inv.statements, static_cast<StatementKind>(k));
        return 0;
    }
    if (m.rfind("op:", 0) == 0) return get(inv.operators, m.substr(3));
    if (m.rfind("literal:", 0) == 0) return get(inv.literals, m.substr(8));
    return 0;
}

ChangeVector count_term_changes(const VersionPair& pair, const Catalog& catalog) {
    ChangeVector cv;
    cv.sloc_before = pair.before.sloc;
    cv.sloc_after = pair.after.sloc;

    std::map<std::string, int> events;
    Counter counter(events);

    diff_declarations(pair.before, pair.after, counter);

    ItemInventory inv_before = extract_inventory(pair.before);
    ItemInventory inv_after = extract_inventory(pair.after);
    diff_callees(inv_before, inv_after, counter);

    Alignment al = align_statements(pair.before, pair.after);
    cv.alignment = al.stats;
    for (const Statement* st : al.added) counter.subtree_one_sided(*st, true);
    for (const Statement* st : al.removed) counter.subtree_one_sided(*st, false);
    for (auto [b, a] : al.modified) counter.modified_pair(*b, *a);

    for (const auto& [term_id, changed] : events) {
        const ChangeTerm* term = catalog.find(term_id);
        if (!term || changed <= 0) continue;
        cv.counts[term_id] =
            TermChangeCount{term_id, changed, matcher_count(*term, inv_before)};
    }
    return cv;
}

} // namespace micose
