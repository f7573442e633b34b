#pragma once

#include <optional>
#include <vector>

#include "micose/ast.hpp"

namespace micose {

struct ClassicMetrics {
    int sloc = 0;
    int mccabe = 1;
    double halstead_difficulty = 0.0;
    int fan_in = 0;
    int fan_out = 0;
};

/// 1 + decision points (If, Elsif, Case arms, For, While, Repeat).
/// Boolean operators inside conditions are not counted.
int mccabe(const Pou& pou);

/// D = (eta1/2) * (N2/eta2) over the body token stream. Operator symbols,
/// statement keywords and call/grouping parentheses classify as operators;
/// identifiers and literals as operands. Separators (';', ',', ':') count
/// as neither. eta2 = 0 yields 0.
double halstead_difficulty(const Pou& pou);

/// fan_in: distinct POUs in the project calling target at least once.
/// fan_out: total call expressions in target's body, repeats counted.
std::pair<int, int> fan_metrics(const std::vector<Pou>& project, const Pou& target);

ClassicMetrics classic_metrics(const Pou& pou);
ClassicMetrics classic_metrics(const std::vector<Pou>& project, const Pou& target);

/// (after - before) / before; nullopt when before is 0 and the change is
/// undefined.
std::optional<double> percent_change(double before, double after);

} // namespace micose
