#pragma once

#include <map>
#include <string>

#include "micose/ast.hpp"

namespace micose {

/// Per-item-kind counts of a POU: declarations by section, compound
/// statements by kind, calls by callee, tracked operator occurrences by
/// symbol, literal occurrences by class, grouping parentheses and call
/// arguments. Feeds the "items of type i before" denominators.
struct ItemInventory {
    std::map<DeclSection, int> declarations;
    std::map<StatementKind, int> statements;
    std::map<std::string, int> calls_by_callee; // callee -> call-expression count
    std::map<std::string, int> operators;       // tracked symbol -> occurrences
    std::map<std::string, int> literals;        // class -> occurrences
    int grouping_parens = 0;                    // '(' not opening a call
    int call_arguments = 0;                     // total arguments across all calls
    int initialized_internal_vars = 0;          // VAR/CONSTANT decls with initializer
    int fb_instances = 0;                       // VAR decls of non-elementary type
    int internal_vars = 0;                      // VAR/CONSTANT decls of elementary type

    int total_calls() const;
    int distinct_callees() const { return static_cast<int>(calls_by_callee.size()); }
    int total_operators() const;

    bool operator==(const ItemInventory&) const = default;
};

/// True for IEC elementary type names (BOOL, INT, REAL, TIME, STRING, ...)
/// and derived array/string forms of them. Anything else declared in a VAR
/// section is treated as a function-block instance.
bool is_elementary_type(std::string_view datatype);

ItemInventory extract_inventory(const Pou& pou);

} // namespace micose
