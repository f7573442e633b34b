#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace micose {

enum class Criticality : std::uint8_t { Functional, Structural, Operator };

std::string_view to_string(Criticality c);

struct ChangeTerm {
    std::string id;
    std::string label;
    Criticality category;
    double s2 = 0.5;
    std::string matcher; // item-kind selector, e.g. "decl:VAR_INPUT", "op:+"
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable after load; freely shared across threads.
struct Catalog {
    std::vector<ChangeTerm> terms;
    std::map<Criticality, double> s1 = {
        {Criticality::Functional, 1.0},
        {Criticality::Structural, 0.67},
        {Criticality::Operator, 0.33},
    };
    double pareto_a = 0.80;
    double pareto_b = 0.20;
    double p = 5.0; // exponential steepness

    const ChangeTerm* find(std::string_view id) const;
    const ChangeTerm& at(std::string_view id) const;
};

/// The built-in 69-term catalog (all s2 = 0.5).
Catalog default_catalog();

/// w = a*s1 + b*s2 (Pareto pair, default 0.80/0.20).
double term_weight(const ChangeTerm& term, const Catalog& catalog);

/// Loads the catalog config (dotted key-value format, see docs/catalog.md)
/// on top of the built-in defaults. A missing path yields the defaults.
/// Throws CatalogError listing every validation failure.
Catalog load_catalog(const std::string& path);

/// Parses catalog config from text (same rules as load_catalog).
Catalog parse_catalog(std::string_view text);

/// Renders a catalog in the config file format (the docs/catalog.default
/// content).
std::string format_catalog(const Catalog& catalog);

/// Matcher vocabulary accepted by the diff engine.
bool is_known_item_kind(std::string_view matcher);

} // namespace micose
