#include "micose/catalog.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace micose {

std::string_view to_string(Criticality c) {
    switch (c) {
    case Criticality::Functional: return "Functional";
    case Criticality::Structural: return "Structural";
    case Criticality::Operator: return "Operator";
    }
    return "?";
}

const ChangeTerm* Catalog::find(std::string_view id) const {
    for (const auto& t : terms)
        if (t.id == id) return &t;
    return nullptr;
}

const ChangeTerm& Catalog::at(std::string_view id) const {
    if (const auto* t = find(id)) return *t;
    throw CatalogError("unknown change term: " + std::string(id));
}

double term_weight(const ChangeTerm& term, const Catalog& catalog) {
    return catalog.pareto_a * catalog.s1.at(term.category) + catalog.pareto_b * term.s2;
}

bool is_known_item_kind(std::string_view m) {
    static const std::set<std::string_view> kinds = {
        "decl:VAR_INPUT", "decl:VAR_OUTPUT", "decl:VAR_IN_OUT",
        "decl:internal", "decl:fb-instance", "decl:initializer",
        "callee",
        "stmt:If", "stmt:Elsif-arm", "stmt:Else-arm", "stmt:Case",
        "stmt:Case-arm", "stmt:For", "stmt:While", "stmt:Repeat",
        "stmt:Exit", "stmt:Return",
        "op::=", "op:+", "op:-", "op:*", "op:/", "op:MOD", "op:**",
        "op:=", "op:<>", "op:<", "op:<=", "op:>", "op:>=",
        "op:AND", "op:OR", "op:XOR", "op:NOT", "op:&",
        "literal:numeric", "literal:time", "literal:string", "literal:boolean",
        "call-arg", "paren",
    };
    return kinds.count(m) != 0;
}

namespace {

void add(Catalog& c, std::string id, std::string label, Criticality cat, std::string matcher) {
    c.terms.push_back(ChangeTerm{std::move(id), std::move(label), cat, 0.5, std::move(matcher)});
}

struct OpSpec {
    const char* key;   // id fragment
    const char* sym;   // matcher symbol
    const char* label;
};

} // namespace

Catalog default_catalog() {
    Catalog c;
    using C = Criticality;

    // Functional: interface and feature-level changes (15 terms)
    add(c, "input-variable-added", "Input variable added", C::Functional, "decl:VAR_INPUT");
    add(c, "input-variable-removed", "Input variable removed", C::Functional, "decl:VAR_INPUT");
    add(c, "input-variable-retyped", "Input variable retyped", C::Functional, "decl:VAR_INPUT");
    add(c, "output-variable-added", "Output variable added", C::Functional, "decl:VAR_OUTPUT");
    add(c, "output-variable-removed", "Output variable removed", C::Functional, "decl:VAR_OUTPUT");
    add(c, "output-variable-retyped", "Output variable retyped", C::Functional, "decl:VAR_OUTPUT");
    add(c, "inout-variable-added", "In-out variable added", C::Functional, "decl:VAR_IN_OUT");
    add(c, "inout-variable-removed", "In-out variable removed", C::Functional, "decl:VAR_IN_OUT");
    add(c, "inout-variable-retyped", "In-out variable retyped", C::Functional, "decl:VAR_IN_OUT");
    add(c, "internal-variable-added", "Internal variable added", C::Functional, "decl:internal");
    add(c, "internal-variable-removed", "Internal variable removed", C::Functional, "decl:internal");
    add(c, "fb-instance-added", "FB instance added", C::Functional, "decl:fb-instance");
    add(c, "fb-instance-removed", "FB instance removed", C::Functional, "decl:fb-instance");
    add(c, "callee-introduced", "New distinct callee introduced", C::Functional, "callee");
    add(c, "callee-removed", "Callee removed", C::Functional, "callee");

    // Structural: control-flow changes (20 terms)
    for (const auto& [key, stmt] : std::initializer_list<std::pair<const char*, const char*>>{
             {"if", "If"}, {"elsif", "Elsif-arm"}, {"case", "Case"},
             {"for", "For"}, {"while", "While"}, {"repeat", "Repeat"}}) {
        std::string matcher = std::string("stmt:") + stmt;
        add(c, std::string(key) + "-added", std::string(stmt) + " added", C::Structural, matcher);
        add(c, std::string(key) + "-removed", std::string(stmt) + " removed", C::Structural, matcher);
        add(c, std::string(key) + "-condition-modified", std::string(stmt) + " condition modified",
            C::Structural, matcher);
    }
    add(c, "case-arm-added", "Case arm added", C::Structural, "stmt:Case-arm");
    add(c, "case-arm-removed", "Case arm removed", C::Structural, "stmt:Case-arm");

    // Operator: token-level changes (34 terms)
    static const OpSpec ops[] = {
        {"assign", ":=", "Assignment"},
        {"plus", "+", "Addition"}, {"minus", "-", "Subtraction"},
        {"times", "*", "Multiplication"}, {"divide", "/", "Division"},
        {"mod", "MOD", "Modulo"}, {"power", "**", "Exponentiation"},
        {"eq", "=", "Equality"}, {"neq", "<>", "Inequality"},
        {"lt", "<", "Less-than"}, {"le", "<=", "Less-or-equal"},
        {"gt", ">", "Greater-than"}, {"ge", ">=", "Greater-or-equal"},
        {"and", "AND", "Logical AND"}, {"or", "OR", "Logical OR"},
        {"xor", "XOR", "Logical XOR"}, {"not", "NOT", "Logical NOT"},
        {"amp", "&", "Logical AND (&)"},
    };
    for (const auto& op : ops)
        add(c, std::string("op-") + op.key + "-changed", std::string(op.label) + " operator changed",
            C::Operator, std::string("op:") + op.sym);
    for (const char* cls : {"numeric", "time", "string", "boolean"})
        add(c, std::string("literal-") + cls + "-changed",
            std::string(cls) + " literal changed", C::Operator, std::string("literal:") + cls);
    add(c, "call-argument-added", "Call argument added", C::Operator, "call-arg");
    add(c, "call-argument-removed", "Call argument removed", C::Operator, "call-arg");
    add(c, "call-argument-modified", "Call argument modified", C::Operator, "call-arg");
    add(c, "else-arm-added", "Else arm added", C::Operator, "stmt:Else-arm");
    add(c, "else-arm-removed", "Else arm removed", C::Operator, "stmt:Else-arm");
    add(c, "exit-added", "Exit added", C::Operator, "stmt:Exit");
    add(c, "exit-removed", "Exit removed", C::Operator, "stmt:Exit");
    add(c, "return-added", "Return added", C::Operator, "stmt:Return");
    add(c, "return-removed", "Return removed", C::Operator, "stmt:Return");
    add(c, "paren-added", "Parenthesization added", C::Operator, "paren");
    add(c, "paren-removed", "Parenthesization removed", C::Operator, "paren");
    add(c, "internal-variable-initializer-changed", "Internal variable initializer changed",
        C::Operator, "decl:initializer");

    return c;
}

namespace {

bool parse_criticality(std::string_view s, Criticality& out) {
    if (s == "Functional") { out = Criticality::Functional; return true; }
    if (s == "Structural") { out = Criticality::Structural; return true; }
    if (s == "Operator") { out = Criticality::Operator; return true; }
    return false;
}

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

} // namespace

Catalog parse_catalog(std::string_view text) {
    Catalog catalog = default_catalog();
    std::vector<std::string> errors;
    std::set<std::string> seen_keys;
    std::set<std::string> default_ids;
    for (const auto& t : catalog.terms) default_ids.insert(t.id);

    // new term ids defined in the file, assembled after parsing all keys
    struct NewTerm {
        std::string category, matcher;
        double s2 = 0.5;
        bool has_category = false;
    };
    std::map<std::string, NewTerm> pending;

    std::istringstream in{std::string(text)};
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
            continue;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (!seen_keys.insert(key).second) {
            errors.push_back("duplicate key: " + key);
            continue;
        }

        if (key == "pareto.a") { catalog.pareto_a = std::stod(value); continue; }
        if (key == "pareto.b") { catalog.pareto_b = std::stod(value); continue; }
        if (key == "p") { catalog.p = std::stod(value); continue; }
        if (key.rfind("s1.", 0) == 0) {
            Criticality cat;
            if (!parse_criticality(key.substr(3), cat))
                errors.push_back("unknown category in key: " + key);
            else
                catalog.s1[cat] = std::stod(value);
            continue;
        }
        if (key.rfind("term.", 0) == 0) {
            auto rest = key.substr(5);
            auto dot = rest.rfind('.');
            if (dot == std::string::npos) {
                errors.push_back("malformed term key: " + key);
                continue;
            }
            std::string id = rest.substr(0, dot);
            std::string field = rest.substr(dot + 1);
            bool existing = default_ids.count(id) != 0;

            if (field == "s2") {
                double s2 = std::stod(value);
                if (s2 < 0.0 || s2 > 1.0) {
                    errors.push_back("term " + id + ": s2 = " + value + " outside [0,1]");
                    continue;
                }
                if (existing) {
                    for (auto& t : catalog.terms)
                        if (t.id == id) t.s2 = s2;
                } else {
                    pending[id].s2 = s2;
                }
            } else if (field == "category") {
                if (existing) {
                    // re-stating the category of a built-in term is a no-op;
                    // changing it is rejected
                    Criticality cat;
                    if (!parse_criticality(value, cat))
                        errors.push_back("term " + id + ": unknown category '" + value + "'");
                    else if (catalog.find(id)->category != cat)
                        errors.push_back("term " + id + ": category of a built-in term cannot change");
                    continue;
                }
                Criticality cat;
                if (!parse_criticality(value, cat)) {
                    errors.push_back("term " + id + ": unknown category '" + value + "'");
                    continue;
                }
                auto& nt = pending[id];
                if (nt.has_category) {
                    errors.push_back("duplicate term id: " + id);
                    continue;
                }
                nt.category = value;
                nt.has_category = true;
            } else if (field == "matcher") {
                if (!is_known_item_kind(value)) {
                    errors.push_back("term " + id + ": unknown matcher '" + value + "'");
                    continue;
                }
                if (existing) {
                    for (auto& t : catalog.terms)
                        if (t.id == id) t.matcher = value;
                } else {
                    pending[id].matcher = value;
                }
            } else if (field == "label") {
                if (existing) {
                    for (auto& t : catalog.terms)
                        if (t.id == id) t.label = value;
                }
            } else {
                errors.push_back("unknown term field: " + field);
            }
            continue;
        }
        errors.push_back("unknown key: " + key);
    }

    for (auto& [id, nt] : pending) {
        if (!nt.has_category) {
            errors.push_back("new term " + id + ": missing category");
            continue;
        }
        if (nt.matcher.empty()) {
            errors.push_back("new term " + id + ": missing matcher");
            continue;
        }
        Criticality cat;
        parse_criticality(nt.category, cat);
        catalog.terms.push_back(ChangeTerm{id, id, cat, nt.s2, nt.matcher});
    }

    if (std::abs(catalog.pareto_a + catalog.pareto_b - 1.0) > 1e-9)
        errors.push_back("pareto weights must sum to 1");
    double f = catalog.s1[Criticality::Functional];
    double s = catalog.s1[Criticality::Structural];
    double o = catalog.s1[Criticality::Operator];
    if (!(f > s && s > o))
        errors.push_back("s1 must be strictly decreasing Functional > Structural > Operator");

    if (!errors.empty()) {
        std::string msg = "catalog validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw CatalogError(msg);
    }
    return catalog;
}

Catalog load_catalog(const std::string& path) {
    std::ifstream f(path);
    if (!f) return default_catalog();
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_catalog(buf.str());
}

std::string format_catalog(const Catalog& catalog) {
    std::ostringstream out;
    out << "# MICOSE change-term catalog\n";
    out << "pareto.a = " << catalog.pareto_a << "\n";
    out << "pareto.b = " << catalog.pareto_b << "\n";
    out << "p = " << catalog.p << "\n";
    for (const auto& [cat, s1] : catalog.s1)
        out << "s1." << to_string(cat) << " = " << s1 << "\n";
    out << "\n";
    for (const auto& t : catalog.terms) {
        out << "term." << t.id << ".category = " << to_string(t.category) << "\n";
        out << "term." << t.id << ".label = " << t.label << "\n";
        out << "term." << t.id << ".matcher = " << t.matcher << "\n";
        out << "term." << t.id << ".s2 = " << t.s2 << "\n";
    }
    return out.str();
}

} // namespace micose
