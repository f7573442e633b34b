#pragma once

#include <string>
#include <vector>

#include "micose/maturity.hpp"

namespace micose {

inline constexpr const char* kArchLevels[] = {
    "PlantModule", "Machine", "Station", "SubSystem", "GeneralFunction",
};

struct LevelRule {
    std::string glob;  // matched against POU name and file path
    std::string level; // one of kArchLevels
};

struct CategoryPattern {
    std::string category; // Enhancement, BugFix, Feature, Development
    std::string pattern;  // regex searched in the commit message
};

struct PhaseBoundary {
    std::string phase; // StartUp or Operation (Design runs from the beginning)
    std::string date;  // ISO date; records at/after this date enter the phase
};

struct RunConfig {
    std::string catalog_path;
    std::string store_path = ".micose/history.jsonl";
    Thresholds thresholds;
    AggregationMode aggregation = AggregationMode::Active;
    ScoreMode score_mode = ScoreMode::Enhanced;
    std::vector<LevelRule> level_rules;
    std::vector<CategoryPattern> category_patterns;
    std::vector<PhaseBoundary> phase_boundaries;
    std::string file_pattern = "*.st";
    bool fail_on_red = false;
    double budget_seconds = 5.0;
    bool latin1_fallback = false;
};

/// Dotted key-value config, documented in docs/config.md. Missing path
/// yields defaults. Throws ConfigError listing every offending line.
RunConfig load_config(const std::string& path);
RunConfig parse_config(std::string_view text);

/// First matching level rule against POU name, then file path; empty when
/// nothing matches.
std::string resolve_level(const RunConfig& config, const std::string& pou_name,
                          const std::string& file_path);

/// Resolution order: explicit override > [category:X]-style tag matched by
/// the configured patterns > "Other".
std::string resolve_category(const RunConfig& config, const std::string& message,
                             const std::string& explicit_category = "");

/// Explicit [phase:X] tag in the message wins; otherwise date boundaries;
/// otherwise empty (unset).
std::string resolve_phase(const RunConfig& config, const std::string& message,
                          const std::string& timestamp);

/// Shell-style glob match (*, ?), case-sensitive.
bool glob_match(std::string_view pattern, std::string_view text);

} // namespace micose
