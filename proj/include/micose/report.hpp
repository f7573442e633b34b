#pragma once

#include <iosfwd>
#include <string>

#include "micose/vcs.hpp"

namespace micose {

/// One-shot before/after analysis of a single POU: term table, category
/// sums, maturity, traffic light, classic-metric comparison.
int cmd_analyze(const std::string& before_path, const std::string& after_path,
                const Catalog& catalog, const RunConfig& config, const std::string& format,
                bool explain, std::ostream& out, std::ostream& err);

/// Per-POU history artifacts: <prefix>.csv always, <prefix>.svg when the
/// history is non-empty.
int cmd_history(const HistoryStore& store, const std::string& pou, const RunConfig& config,
                const std::string& out_prefix, std::ostream& out, std::ostream& err);

/// Grouped statistics (count, mean maturity, population sigma) by
/// category, level, phase or change-number. Change-number mode also emits
/// a scatter CSV and a first/second-half variance comparison.
int cmd_stats(const HistoryStore& store, const std::string& group_by, const RunConfig& config,
              const std::string& format, const std::string& scatter_csv,
              std::ostream& out, std::ostream& err);

/// Empirical indicator checks over the stored corpus; each prints
/// HOLDS / VIOLATED / INSUFFICIENT-DATA with the compared group means.
int cmd_check_indicators(const HistoryStore& store, const RunConfig& config, std::ostream& out);

/// Walks all revisions oldest-first, analyzes consecutive pairs, appends
/// records. Resumable: already-stored changeset ids are skipped.
int cmd_backfill(const RepoSource& source, HistoryStore& store, const Catalog& catalog,
                 const RunConfig& config, std::ostream& out, std::ostream& err);

/// Population standard deviation.
double population_sigma(const std::vector<double>& xs);
double mean(const std::vector<double>& xs);

} // namespace micose
