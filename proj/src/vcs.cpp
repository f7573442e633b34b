#include "micose/vcs.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "micose/parser.hpp"

namespace micose {

namespace fs = std::filesystem;

namespace {

struct CommandResult {
    int status;
    std::string out;
};

CommandResult run_command(const std::string& cmd) {
    std::string full = cmd + " 2>&1";
    FILE* pipe = ::popen(full.c_str(), "r");
    if (!pipe) throw VcsError("cannot spawn: " + cmd);
    std::string out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = ::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    int status = ::pclose(pipe);
    return {status, std::move(out)};
}

std::string check_command(const std::string& cmd) {
    CommandResult r = run_command(cmd);
    if (r.status != 0)
        throw VcsError("command failed (" + std::to_string(r.status) + "): " + cmd +
                       "\n" + r.out);
    return r.out;
}

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

std::string git(const RepoSource& src, const std::string& args) {
    return "git -C " + shell_quote(src.root) + " " + args;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto next = line.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

// --- snapshot directory mode -------------------------------------------

std::vector<fs::path> snapshot_files(const RepoSource& src) {
    std::vector<fs::path> files;
    if (!fs::is_directory(src.root))
        throw VcsError("snapshot root does not exist: " + src.root);
    for (const auto& e : fs::directory_iterator(src.root)) {
        if (!e.is_regular_file()) continue;
        if (glob_match(src.file_pattern, e.path().filename().string()))
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end()); // lexicographic = chronological
    return files;
}

struct SnapshotMeta {
    std::string timestamp, author, message;
};

std::map<std::string, SnapshotMeta> snapshot_meta(const RepoSource& src) {
    std::map<std::string, SnapshotMeta> meta;
    std::ifstream f(fs::path(src.root) / "meta.json");
    if (!f) return meta;
    nlohmann::json j = nlohmann::json::parse(f, nullptr, false);
    if (j.is_discarded()) return meta;
    for (const auto& [id, m] : j.items())
        meta[id] = {m.value("timestamp", ""), m.value("author", ""), m.value("message", "")};
    return meta;
}

std::string read_file_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw NotFoundError("cannot read: " + p.string());
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

} // namespace

std::string decode_text(const std::string& bytes, bool latin1_fallback) {
    if (bytes.find('\0') != std::string::npos)
        throw VcsError("binary content (NUL byte)");

    // UTF-8 validity scan
    bool valid = true;
    for (std::size_t i = 0; i < bytes.size() && valid;) {
        unsigned char c = static_cast<unsigned char>(bytes[i]);
        int len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3
                 : (c >> 3) == 0x1E ? 4 : 0;
        if (len == 0 || i + len > bytes.size()) { valid = false; break; }
        for (int k = 1; k < len; ++k)
            if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) { valid = false; break; }
        i += len;
    }
    if (valid) return bytes;
    if (!latin1_fallback) throw VcsError("content is not valid UTF-8");

    std::string out;
    out.reserve(bytes.size() * 2);
    for (unsigned char c : bytes) {
        if (c < 0x80) out += static_cast<char>(c);
        else {
            out += static_cast<char>(0xC0 | (c >> 6));
            out += static_cast<char>(0x80 | (c & 0x3F));
        }
    }
    return out;
}

std::vector<RevisionInfo> list_revisions(const RepoSource& source, const std::string& path) {
    std::vector<RevisionInfo> out;

    if (source.kind == RepoSource::Kind::SnapshotDir) {
        auto meta = snapshot_meta(source);
        for (const auto& f : snapshot_files(source)) {
            RevisionInfo ri;
            ri.id = f.stem().string();
            ri.changed_files = {f.filename().string()};
            if (auto it = meta.find(ri.id); it != meta.end()) {
                ri.timestamp = it->second.timestamp;
                ri.author = it->second.author;
                ri.message = it->second.message;
            }
            out.push_back(std::move(ri));
        }
        return out;
    }

    std::string cmd = git(source, "log --reverse --first-parent --format=%H%x1f%cI%x1f%an%x1f%s");
    if (!path.empty()) cmd += " -- " + shell_quote(path);
    for (const auto& line : split_lines(check_command(cmd))) {
        auto fields = split_fields(line, '\x1f');
        if (fields.size() != 4) continue;
        RevisionInfo ri;
        ri.id = fields[0];
        ri.timestamp = fields[1];
        ri.author = fields[2];
        ri.message = fields[3];
        std::string files = check_command(
            git(source, "diff-tree --root --no-commit-id --name-only -r --first-parent " +
                            shell_quote(ri.id)));
        for (const auto& f : split_lines(files))
            if (glob_match(source.file_pattern, f) ||
                glob_match(source.file_pattern, fs::path(f).filename().string()))
                ri.changed_files.push_back(f);
        if (path.empty() || std::find(ri.changed_files.begin(), ri.changed_files.end(), path) !=
                                ri.changed_files.end())
            out.push_back(std::move(ri));
    }
    return out;
}

std::string read_version(const RepoSource& source, const std::string& path,
                         const std::string& revision) {
    if (source.kind == RepoSource::Kind::SnapshotDir) {
        for (const auto& f : snapshot_files(source))
            if (f.stem().string() == revision) return read_file_bytes(f);
        throw NotFoundError("no snapshot revision: " + revision);
    }
    CommandResult r =
        run_command(git(source, "show " + shell_quote(revision + ":" + path)));
    if (r.status != 0)
        throw NotFoundError("path not found at revision: " + path + "@" + revision);
    return r.out;
}

std::string parent_revision(const RepoSource& source, const std::string& revision,
                            const std::string&) {
    if (source.kind == RepoSource::Kind::SnapshotDir) {
        auto files = snapshot_files(source);
        for (std::size_t i = 0; i < files.size(); ++i)
            if (files[i].stem().string() == revision)
                return i > 0 ? files[i - 1].stem().string() : std::string{};
        return {};
    }
    CommandResult r = run_command(git(source, "rev-parse --verify " +
                                                  shell_quote(revision + "^")));
    if (r.status != 0) return {};
    auto lines = split_lines(r.out);
    return lines.empty() ? std::string{} : lines.front();
}

namespace {

RevisionInfo revision_info(const RepoSource& source, const std::string& revision) {
    for (auto& ri : list_revisions(source))
        if (ri.id == revision) return ri;
    throw VcsError("unknown revision: " + revision);
}

std::map<std::string, Pou> parse_side(const std::string& text,
                                      std::vector<std::string>& diagnostics,
                                      const std::string& label) {
    std::map<std::string, Pou> out;
    for (const auto& chunk : split_pous(text)) {
        try {
            Pou pou = parse_pou(chunk);
            out[pou.name] = std::move(pou);
        } catch (const std::exception& e) {
            diagnostics.push_back(label + ": " + e.what());
        }
    }
    return out;
}

} // namespace

HookOutcome hook_run(const RepoSource& source, const std::string& revision,
                     HistoryStore& store, const Catalog& catalog, const RunConfig& config,
                     const std::string& explicit_category) {
    HookOutcome out;

    RevisionInfo rev = revision_info(source, revision);
    std::string parent = parent_revision(source, revision);

    ChangesetRecord& rec = out.record;
    rec.changeset_id = rev.id;
    rec.timestamp = rev.timestamp;
    rec.author = rev.author;
    rec.category = resolve_category(config, rev.message, explicit_category);
    rec.lifecycle_phase = resolve_phase(config, rev.message, rev.timestamp);

    bool any_red = false;

    // snapshot mode: the changed "file" of revision vNNN is that version file,
    // its before-version is the previous snapshot
    for (const auto& file : rev.changed_files) {
        std::string after_text, before_text;
        try {
            if (source.kind == RepoSource::Kind::SnapshotDir) {
                after_text = decode_text(read_version(source, file, rev.id),
                                         config.latin1_fallback);
                if (!parent.empty())
                    before_text = decode_text(read_version(source, file, parent),
                                              config.latin1_fallback);
            } else {
                after_text = decode_text(read_version(source, file, rev.id),
                                         config.latin1_fallback);
                if (!parent.empty()) {
                    try {
                        before_text = decode_text(read_version(source, file, parent),
                                                  config.latin1_fallback);
                    } catch (const NotFoundError&) {
                        // file added in this revision
                    }
                }
            }
        } catch (const NotFoundError&) {
            continue; // file deleted in this revision
        } catch (const VcsError& e) {
            out.diagnostics.push_back(file + ": skipped (" + e.what() + ")");
            continue;
        }

        auto before_pous = parse_side(before_text, out.diagnostics, file + " (before)");
        auto after_pous = parse_side(after_text, out.diagnostics, file + " (after)");

        for (auto& [name, after_pou] : after_pous) {
            try {
                PouOutcome outcome;
                outcome.architectural_level = resolve_level(config, name, file);
                outcome.metrics_after = classic_metrics(after_pou);

                auto bit = before_pous.find(name);
                if (bit == before_pous.end()) {
                    // initial version: baseline, maturity 1
                    outcome.relevant = false;
                    outcome.maturity.size_factors = size_factors(after_pou.sloc);
                    outcome.maturity.color = traffic_light(1.0, config.thresholds);
                    out.summary.push_back(name + ": baseline stored (maturity 1.000)");
                } else {
                    outcome.metrics_before = classic_metrics(bit->second);
                    VersionPair pair{std::move(bit->second), after_pou, name};
                    ChangeVector cv = count_term_changes(pair, catalog);
                    outcome.maturity = score_change(cv, catalog, config.aggregation,
                                                    config.thresholds, config.score_mode);
                    outcome.relevant = !cv.empty();
                    if (!outcome.relevant) {
                        out.summary.push_back(name + ": no metric-relevant change");
                    } else {
                        char buf[64];
                        std::snprintf(buf, sizeof buf, "%.3f", outcome.maturity.maturity);
                        out.summary.push_back(name + ": maturity " + buf + " [" +
                                              std::string(to_string(outcome.maturity.color)) +
                                              "]");
                        any_red = any_red || outcome.maturity.color == TrafficLight::Red;
                    }
                }
                rec.pou_results[name] = std::move(outcome);
            } catch (const std::exception& e) {
                out.diagnostics.push_back(name + ": analysis failed (" + std::string(e.what()) +
                                          ")");
            }
        }
    }

    try {
        store.append_record(rec);
        out.appended = true;
    } catch (const DuplicateIdError&) {
        out.summary.push_back("changeset " + rec.changeset_id + " already recorded; no-op");
        out.exit_status = 0;
        return out;
    } catch (const StoreError& e) {
        out.diagnostics.push_back(e.what());
        out.exit_status = 3;
        return out;
    }

    if (config.fail_on_red && any_red) out.exit_status = 2;
    return out;
}

} // namespace micose
