#include "micose/config.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fnmatch.h>

namespace micose {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    std::size_t b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

bool valid_level(std::string_view level) {
    for (const char* l : kArchLevels)
        if (level == l) return true;
    return false;
}

} // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
    return ::fnmatch(std::string(pattern).c_str(), std::string(text).c_str(), 0) == 0;
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<std::string> errors;

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

        try {
            if (key == "catalog") cfg.catalog_path = value;
            else if (key == "store") cfg.store_path = value;
            else if (key == "thresholds.green") cfg.thresholds.green = std::stod(value);
            else if (key == "thresholds.yellow") cfg.thresholds.yellow = std::stod(value);
            else if (key == "aggregation") {
                if (value == "active") cfg.aggregation = AggregationMode::Active;
                else if (value == "catalog") cfg.aggregation = AggregationMode::Catalog;
                else errors.push_back("aggregation must be active or catalog");
            } else if (key == "mode") {
                if (value == "enhanced") cfg.score_mode = ScoreMode::Enhanced;
                else if (value == "legacy") cfg.score_mode = ScoreMode::Legacy;
                else errors.push_back("mode must be enhanced or legacy");
            } else if (key == "file_pattern") cfg.file_pattern = value;
            else if (key == "fail_on_red") cfg.fail_on_red = value == "true" || value == "1";
            else if (key == "latin1_fallback") cfg.latin1_fallback = value == "true" || value == "1";
            else if (key == "budget_seconds") cfg.budget_seconds = std::stod(value);
            else if (key == "level") {
                auto colon = value.find(':');
                if (colon == std::string::npos) {
                    errors.push_back("level entry must be <Level>:<glob>");
                } else {
                    std::string level = trim(value.substr(0, colon));
                    std::string glob = trim(value.substr(colon + 1));
                    if (!valid_level(level))
                        errors.push_back("unknown architectural level: " + level);
                    else
                        cfg.level_rules.push_back({glob, level});
                }
            } else if (key.rfind("category.", 0) == 0) {
                cfg.category_patterns.push_back({key.substr(9), value});
            } else if (key.rfind("phase.", 0) == 0) {
                std::string phase = key.substr(6);
                if (phase != "StartUp" && phase != "Operation")
                    errors.push_back("phase boundary must be StartUp or Operation");
                else
                    cfg.phase_boundaries.push_back({phase, value});
            } else {
                errors.push_back("unknown key: " + key);
            }
        } catch (const std::exception&) {
            errors.push_back("line " + std::to_string(lineno) + ": bad value '" + value + "'");
        }
    }

    if (!(cfg.thresholds.green > cfg.thresholds.yellow))
        errors.push_back("thresholds.green must exceed thresholds.yellow");

    if (!errors.empty()) {
        std::string msg = "config validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) return RunConfig{};
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

std::string resolve_level(const RunConfig& config, const std::string& pou_name,
                          const std::string& file_path) {
    for (const auto& rule : config.level_rules)
        if (glob_match(rule.glob, pou_name) || glob_match(rule.glob, file_path))
            return rule.level;
    return {};
}

std::string resolve_category(const RunConfig& config, const std::string& message,
                             const std::string& explicit_category) {
    if (!explicit_category.empty()) return explicit_category;
    for (const auto& cp : config.category_patterns) {
        try {
            std::regex re(cp.pattern, std::regex::icase);
            if (std::regex_search(message, re)) return cp.category;
        } catch (const std::regex_error&) {
            // fall back to a literal substring match for malformed patterns
            auto lower = [](std::string s) {
                std::transform(s.begin(), s.end(), s.begin(),
                               [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
                return s;
            };
            if (lower(message).find(lower(cp.pattern)) != std::string::npos)
                return cp.category;
        }
    }
    return "Other";
}

std::string resolve_phase(const RunConfig& config, const std::string& message,
                          const std::string& timestamp) {
    static const std::regex tag(R"(\[phase:([A-Za-z]+)\])", std::regex::icase);
    std::smatch m;
    if (std::regex_search(message, m, tag)) {
        std::string p = m[1].str();
        if (p == "Design" || p == "StartUp" || p == "Operation") return p;
    }
    if (config.phase_boundaries.empty() || timestamp.empty()) return {};
    std::string startup, operation;
    for (const auto& b : config.phase_boundaries)
        (b.phase == "StartUp" ? startup : operation) = b.date;
    std::string date = timestamp.substr(0, 10);
    if (!operation.empty() && date >= operation) return "Operation";
    if (!startup.empty() && date >= startup) return "StartUp";
    return "Design";
}

} // namespace micose
