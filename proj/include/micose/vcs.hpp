#pragma once

#include <string>
#include <vector>

#include "micose/config.hpp"
#include "micose/store.hpp"

namespace micose {

struct RepoSource {
    enum class Kind { VcsCli, SnapshotDir };
    Kind kind = Kind::SnapshotDir;
    std::string root;
    std::string file_pattern = "*.st";
};

struct RevisionInfo {
    std::string id;
    std::string timestamp;
    std::string author;
    std::string message;
    std::vector<std::string> changed_files; // restricted to file_pattern matches
};

class VcsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotFoundError : public VcsError {
public:
    using VcsError::VcsError;
};

/// Chronological, oldest first. Snapshot directories synthesize ids from
/// the version file stems; an optional meta.json supplies timestamp,
/// author and message per id. `path` narrows a VCS log to one file; empty
/// lists all revisions touching matching files.
std::vector<RevisionInfo> list_revisions(const RepoSource& source, const std::string& path = "");

/// Exact content of `path` at `revision`. Throws NotFoundError when the
/// path does not exist at that revision.
std::string read_version(const RepoSource& source, const std::string& path,
                         const std::string& revision);

/// Revision preceding `revision` for `path`; empty when none exists.
std::string parent_revision(const RepoSource& source, const std::string& revision,
                            const std::string& path = "");

struct HookOutcome {
    int exit_status = 0; // 0 ok, 2 red gate, 3 store unavailable
    bool appended = false;
    ChangesetRecord record;
    std::vector<std::string> summary; // one line per POU, for stdout
    std::vector<std::string> diagnostics;
};

/// Post-commit entry point: analyze every changed ST file of `revision`
/// against its parent, append one ChangesetRecord, print traffic-light
/// summaries. Per-file failures are reported and do not abort the rest.
HookOutcome hook_run(const RepoSource& source, const std::string& revision,
                     HistoryStore& store, const Catalog& catalog, const RunConfig& config,
                     const std::string& explicit_category = "");

/// Decodes raw file bytes: UTF-8 by default, Latin-1 transcoding when the
/// config flag is set and the bytes are not valid UTF-8. Throws VcsError
/// on undecodable content (NUL bytes / invalid UTF-8 without fallback).
std::string decode_text(const std::string& bytes, bool latin1_fallback);

} // namespace micose
