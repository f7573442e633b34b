#pragma once

#include <optional>
#include <string>
#include <vector>

#include "micose/maturity.hpp"
#include "micose/metrics.hpp"

namespace micose {

struct PouOutcome {
    MaturityResult maturity;
    ClassicMetrics metrics_before;
    ClassicMetrics metrics_after;
    std::string architectural_level; // empty when unmapped
    bool relevant = true;            // false for empty change vectors / baselines
};

struct ChangesetRecord {
    std::string changeset_id;
    std::string timestamp; // ISO 8601
    std::string author;
    std::string category = "Other"; // Enhancement, BugFix, Feature, Development, Other
    std::string lifecycle_phase;    // Design, StartUp, Operation; empty = unset
    std::map<std::string, PouOutcome> pou_results;
};

struct PouHistoryEntry {
    int change_number = 0; // 1-based, counted per POU over relevant records
    std::string changeset_id;
    MaturityResult maturity;
    std::string category;
    std::string lifecycle_phase;
    std::string timestamp;
};

struct PouHistory {
    std::string pou_name;
    std::vector<PouHistoryEntry> entries;
};

struct QueryFilter {
    std::optional<std::string> category;
    std::optional<std::string> level;
    std::optional<std::string> phase;
    std::optional<std::string> date_from; // inclusive, ISO compare
    std::optional<std::string> date_to;   // inclusive
};

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DuplicateIdError : public StoreError {
public:
    using StoreError::StoreError;
};

std::string to_json_line(const ChangesetRecord& record);
ChangesetRecord record_from_json(const std::string& line);

/// Append-only JSON-lines store (one record per line, schema v1).
/// Writers serialize through an advisory lock file; readers never block.
class HistoryStore {
public:
    explicit HistoryStore(std::string path);

    const std::string& path() const { return path_; }

    /// Durable append. Rejects duplicate changeset ids.
    std::string append_record(const ChangesetRecord& record);

    std::vector<ChangesetRecord> load_all() const;

    bool has_changeset(const std::string& changeset_id) const;

    /// Relevant records touching the POU, ordered, gap-free change numbers.
    /// Records whose change vector was empty are excluded.
    PouHistory load_history(const std::string& pou_name) const;

    std::vector<ChangesetRecord> query(const QueryFilter& filter) const;

private:
    std::string path_;
};

} // namespace micose
