#include "micose/store.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <fcntl.h>
#include <unistd.h>

#include <json.hpp>

namespace micose {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json maturity_to_json(const MaturityResult& m) {
    json terms = json::array();
    for (const auto& td : m.term_deltas)
        terms.push_back({{"id", td.term_id},
                         {"category", std::string(to_string(td.category))},
                         {"changed", td.changed},
                         {"before", td.before_total},
                         {"ratio", td.ratio},
                         {"w", td.w},
                         {"delta", td.delta}});
    json cats = json::object();
    for (const auto& [c, d] : m.category_deltas) cats[std::string(to_string(c))] = d;
    return {{"maturity", m.maturity},
            {"n", m.n},
            {"color", std::string(to_string(m.color))},
            {"mode", m.mode == ScoreMode::Legacy ? "legacy" : "enhanced"},
            {"k_l", m.size_factors.k_l},
            {"k_e", m.size_factors.k_e},
            {"sloc_basis", m.size_factors.sloc_basis},
            {"terms", terms},
            {"category_deltas", cats}};
}

Criticality criticality_from(const std::string& s) {
    if (s == "Functional") return Criticality::Functional;
    if (s == "Structural") return Criticality::Structural;
    return Criticality::Operator;
}

MaturityResult maturity_from_json(const json& j) {
    MaturityResult m;
    m.maturity = j.at("maturity").get<double>();
    m.n = j.at("n").get<int>();
    std::string color = j.at("color").get<std::string>();
    m.color = color == "green" ? TrafficLight::Green
            : color == "yellow" ? TrafficLight::Yellow
                                : TrafficLight::Red;
    m.mode = j.at("mode").get<std::string>() == "legacy" ? ScoreMode::Legacy
                                                         : ScoreMode::Enhanced;
    m.size_factors.k_l = j.at("k_l").get<double>();
    m.size_factors.k_e = j.at("k_e").get<double>();
    m.size_factors.sloc_basis = j.at("sloc_basis").get<int>();
    for (const auto& t : j.at("terms")) {
        TermDelta td;
        td.term_id = t.at("id").get<std::string>();
        td.category = criticality_from(t.at("category").get<std::string>());
        td.changed = t.at("changed").get<int>();
        td.before_total = t.at("before").get<int>();
        td.ratio = t.at("ratio").get<double>();
        td.w = t.at("w").get<double>();
        td.delta = t.at("delta").get<double>();
        m.term_deltas.push_back(std::move(td));
    }
    for (const auto& [k, v] : j.at("category_deltas").items())
        m.category_deltas[criticality_from(k)] = v.get<double>();
    return m;
}

json metrics_to_json(const ClassicMetrics& c) {
    return {{"sloc", c.sloc},
            {"mccabe", c.mccabe},
            {"halstead_difficulty", c.halstead_difficulty},
            {"fan_in", c.fan_in},
            {"fan_out", c.fan_out}};
}

ClassicMetrics metrics_from_json(const json& j) {
    ClassicMetrics c;
    c.sloc = j.at("sloc").get<int>();
    c.mccabe = j.at("mccabe").get<int>();
    c.halstead_difficulty = j.at("halstead_difficulty").get<double>();
    c.fan_in = j.at("fan_in").get<int>();
    c.fan_out = j.at("fan_out").get<int>();
    return c;
}

} // namespace

std::string to_json_line(const ChangesetRecord& r) {
    json pous = json::object();
    for (const auto& [name, outcome] : r.pou_results)
        pous[name] = {{"maturity", maturity_to_json(outcome.maturity)},
                      {"metrics_before", metrics_to_json(outcome.metrics_before)},
                      {"metrics_after", metrics_to_json(outcome.metrics_after)},
                      {"level", outcome.architectural_level},
                      {"relevant", outcome.relevant}};
    json j = {{"v", 1},
              {"changeset_id", r.changeset_id},
              {"timestamp", r.timestamp},
              {"author", r.author},
              {"category", r.category},
              {"phase", r.lifecycle_phase},
              {"pous", pous}};
    return j.dump();
}

ChangesetRecord record_from_json(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw StoreError("malformed store record: " + line.substr(0, 80));
    if (j.value("v", 0) != 1) throw StoreError("unsupported record schema version");
    try {
        ChangesetRecord r;
        r.changeset_id = j.at("changeset_id").get<std::string>();
        r.timestamp = j.at("timestamp").get<std::string>();
        r.author = j.at("author").get<std::string>();
        r.category = j.at("category").get<std::string>();
        r.lifecycle_phase = j.at("phase").get<std::string>();
        for (const auto& [name, pj] : j.at("pous").items()) {
            PouOutcome o;
            o.maturity = maturity_from_json(pj.at("maturity"));
            o.metrics_before = metrics_from_json(pj.at("metrics_before"));
            o.metrics_after = metrics_from_json(pj.at("metrics_after"));
            o.architectural_level = pj.at("level").get<std::string>();
            o.relevant = pj.at("relevant").get<bool>();
            r.pou_results[name] = std::move(o);
        }
        return r;
    } catch (const json::exception& e) {
        throw StoreError(std::string("malformed store record: ") + e.what());
    }
}

HistoryStore::HistoryStore(std::string path) : path_(std::move(path)) {}

namespace {

class LockFile {
public:
    explicit LockFile(const std::string& path) : path_(path + ".lock") {
        for (int attempt = 0; attempt < 50; ++attempt) {
            fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd_ >= 0) return;
            std::this_thread::sleep_for(std::chrono::milliseconds(20));
        }
        throw StoreError("store lock unavailable: " + path_);
    }
    ~LockFile() {
        if (fd_ >= 0) {
            ::close(fd_);
            ::unlink(path_.c_str());
        }
    }
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;

private:
    std::string path_;
    int fd_ = -1;
};

} // namespace

std::string HistoryStore::append_record(const ChangesetRecord& record) {
    if (record.changeset_id.empty()) throw StoreError("empty changeset id");
    fs::path p(path_);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());

    LockFile lock(path_);
    if (has_changeset(record.changeset_id))
        throw DuplicateIdError("changeset already recorded: " + record.changeset_id);

    std::string line = to_json_line(record) + "\n";
    // single write + flush; readers ignore a torn trailing line without '\n'
    int fd = ::open(path_.c_str(), O_CREAT | O_RDWR | O_APPEND, 0644);
    if (fd < 0) throw StoreError("cannot open store for append: " + path_);
    // drop a torn trailing line left by a crashed append so the new record
    // starts on its own line
    off_t size = ::lseek(fd, 0, SEEK_END);
    if (size > 0) {
        char last = '\n';
        if (::pread(fd, &last, 1, size - 1) == 1 && last != '\n') {
            off_t keep = 0;
            std::ifstream scan(path_, std::ios::binary);
            std::string content((std::istreambuf_iterator<char>(scan)),
                                std::istreambuf_iterator<char>());
            std::size_t nl = content.rfind('\n');
            keep = nl == std::string::npos ? 0 : static_cast<off_t>(nl + 1);
            if (::ftruncate(fd, keep) != 0) {
                ::close(fd);
                throw StoreError("cannot repair torn store line: " + path_);
            }
        }
    }
    ssize_t written = ::write(fd, line.data(), line.size());
    ::fsync(fd);
    ::close(fd);
    if (written != static_cast<ssize_t>(line.size()))
        throw StoreError("short write to store: " + path_);
    return record.changeset_id;
}

std::vector<ChangesetRecord> HistoryStore::load_all() const {
    std::vector<ChangesetRecord> out;
    std::ifstream f(path_, std::ios::binary);
    if (!f) return out;
    std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        if (nl == std::string::npos) break; // torn trailing line from a crashed append
        std::string line = content.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        out.push_back(record_from_json(line));
    }
    return out;
}

bool HistoryStore::has_changeset(const std::string& changeset_id) const {
    for (const auto& r : load_all())
        if (r.changeset_id == changeset_id) return true;
    return false;
}

PouHistory HistoryStore::load_history(const std::string& pou_name) const {
    PouHistory hist;
    hist.pou_name = pou_name;
    int number = 0;
    for (const auto& r : load_all()) {
        auto it = r.pou_results.find(pou_name);
        if (it == r.pou_results.end() || !it->second.relevant) continue;
        PouHistoryEntry e;
        e.change_number = ++number;
        e.changeset_id = r.changeset_id;
        e.maturity = it->second.maturity;
        e.category = r.category;
        e.lifecycle_phase = r.lifecycle_phase;
        e.timestamp = r.timestamp;
        hist.entries.push_back(std::move(e));
    }
    return hist;
}

std::vector<ChangesetRecord> HistoryStore::query(const QueryFilter& f) const {
    std::vector<ChangesetRecord> out;
    for (auto& r : load_all()) {
        if (f.category && r.category != *f.category) continue;
        if (f.phase && r.lifecycle_phase != *f.phase) continue;
        if (f.date_from && r.timestamp < *f.date_from) continue;
        if (f.date_to && r.timestamp > *f.date_to) continue;
        if (f.level) {
            bool any = false;
            for (const auto& [_, o] : r.pou_results)
                any = any || o.architectural_level == *f.level;
            if (!any) continue;
        }
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace micose
