#include "micose/metrics.hpp"

#include <map>
#include <set>

#include "micose/inventory.hpp"

namespace micose {

namespace {

int decision_points(const std::vector<Statement>& stmts) {
    int n = 0;
    for (const auto& s : stmts) {
        switch (s.kind) {
        case StatementKind::If:
        case StatementKind::ElsifArm:
        case StatementKind::CaseArm:
        case StatementKind::For:
        case StatementKind::While:
        case StatementKind::Repeat:
            ++n;
            break;
        default:
            break;
        }
        n += decision_points(s.children);
    }
    return n;
}

} // namespace

int mccabe(const Pou& pou) { return 1 + decision_points(pou.body); }

double halstead_difficulty(const Pou& pou) {
    std::map<std::string, int> operators;
    std::map<std::string, int> operands;
    for (const auto& t : pou.body_tokens) {
        switch (t.kind) {
        case TokenKind::Operator:
        case TokenKind::Keyword:
            ++operators[t.text];
            break;
        case TokenKind::LParen:
            ++operators["()"];
            break;
        case TokenKind::LBracket:
            ++operators["[]"];
            break;
        case TokenKind::Identifier:
        case TokenKind::NumberLiteral:
        case TokenKind::TimeLiteral:
        case TokenKind::StringLiteral:
        case TokenKind::BoolLiteral:
            ++operands[t.text];
            break;
        default:
            break; // separators and closing brackets
        }
    }
    const double eta1 = static_cast<double>(operators.size());
    const double eta2 = static_cast<double>(operands.size());
    if (eta2 == 0.0) return 0.0;
    double n2 = 0.0;
    for (const auto& [_, c] : operands) n2 += c;
    return (eta1 / 2.0) * (n2 / eta2);
}

std::pair<int, int> fan_metrics(const std::vector<Pou>& project, const Pou& target) {
    int fan_in = 0;
    for (const auto& pou : project) {
        if (pou.name == target.name) continue;
        ItemInventory inv = extract_inventory(pou);
        if (inv.calls_by_callee.count(target.name)) ++fan_in;
    }
    int fan_out = extract_inventory(target).total_calls();
    return {fan_in, fan_out};
}

ClassicMetrics classic_metrics(const Pou& pou) {
    ClassicMetrics m;
    m.sloc = pou.sloc;
    m.mccabe = mccabe(pou);
    m.halstead_difficulty = halstead_difficulty(pou);
    m.fan_out = extract_inventory(pou).total_calls();
    return m;
}

ClassicMetrics classic_metrics(const std::vector<Pou>& project, const Pou& target) {
    ClassicMetrics m = classic_metrics(target);
    m.fan_in = fan_metrics(project, target).first;
    return m;
}

std::optional<double> percent_change(double before, double after) {
    if (before <= 0.0) return std::nullopt;
    return (after - before) / before;
}

} // namespace micose
