#pragma once

#include <map>
#include <string>

#include "micose/ast.hpp"
#include "micose/catalog.hpp"
#include "micose/inventory.hpp"

namespace micose {

struct VersionPair {
    Pou before;
    Pou after;
    std::string pou_name;
};

struct AlignmentStats {
    int matched_equal = 0;
    int matched_modified = 0;
    int added = 0;
    int removed = 0;
};

/// Statement alignment of one body pair. Pointers refer into the input POUs.
struct Alignment {
    AlignmentStats stats;
    std::vector<std::pair<const Statement*, const Statement*>> modified;
    std::vector<const Statement*> added;   // roots of added subtrees (after)
    std::vector<const Statement*> removed; // roots of removed subtrees (before)
};

struct TermChangeCount {
    std::string term_id;
    int changed = 0;
    int before_total = 0;
};

struct ChangeVector {
    std::map<std::string, TermChangeCount> counts; // only nonzero terms
    int sloc_before = 0;
    int sloc_after = 0;
    AlignmentStats alignment;

    bool empty() const { return counts.empty(); }
};

/// LCS alignment over normalized statements, recursing into matched
/// compounds. Statements equal in kind, tokens and children are
/// matched-equal; same-kind leftovers pair up as matched-modified.
Alignment align_statements(const Pou& before, const Pou& after);

/// Eq-style ratio: 0 when nothing changed, else changed / max(before, changed).
double change_ratio(const TermChangeCount& count);

ChangeVector count_term_changes(const VersionPair& pair, const Catalog& catalog);

/// Inventory count backing a term's "items before" denominator, resolved
/// through the term's matcher.
int matcher_count(const ChangeTerm& term, const ItemInventory& inv);

} // namespace micose
