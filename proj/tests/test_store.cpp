#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "micose/store.hpp"

using namespace micose;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("micose-store-test-" + std::to_string(std::random_device{}()) + "-" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

PouOutcome outcome(double maturity, bool relevant = true, const std::string& level = "Station") {
    PouOutcome out;
    out.maturity.maturity = maturity;
    out.maturity.n = relevant ? 1 : 0;
    out.maturity.color = maturity >= 0.9 ? TrafficLight::Green
                         : maturity >= 0.7 ? TrafficLight::Yellow
                                           : TrafficLight::Red;
    out.metrics_before = ClassicMetrics{10, 2, 0.5, 1, 3};
    out.metrics_after = ClassicMetrics{12, 3, 0.75, 1, 4};
    out.architectural_level = level;
    out.relevant = relevant;
    return out;
}

ChangesetRecord record(const std::string& id, const std::string& pou, double maturity,
                       const std::string& category = "Other",
                       const std::string& phase = "Design",
                       const std::string& ts = "2026-01-01T00:00:00Z") {
    ChangesetRecord r;
    r.changeset_id = id;
    r.timestamp = ts;
    r.author = "dev";
    r.category = category;
    r.lifecycle_phase = phase;
    r.pou_results[pou] = outcome(maturity);
    return r;
}

} // namespace

TEST_CASE("json line round trip preserves the record") {
    ChangesetRecord r = record("c1", "FB_A", 0.81, "BugFix", "StartUp");
    r.pou_results["FB_B"] = outcome(1.0, false, "Machine");
    r.pou_results["FB_A"].maturity.category_deltas[Criticality::Functional] = 0.19;
    r.pou_results["FB_A"].maturity.term_deltas.push_back(
        TermDelta{"input-variable-added", Criticality::Functional, 0.19, 0.9, 0.21, 2, 9});

    ChangesetRecord back = record_from_json(to_json_line(r));
    CHECK(back.changeset_id == r.changeset_id);
    CHECK(back.timestamp == r.timestamp);
    CHECK(back.author == r.author);
    CHECK(back.category == r.category);
    CHECK(back.lifecycle_phase == r.lifecycle_phase);
    REQUIRE(back.pou_results.size() == 2);
    const PouOutcome& a = back.pou_results.at("FB_A");
    CHECK(a.maturity.maturity == doctest::Approx(0.81));
    CHECK(a.maturity.color == TrafficLight::Yellow);
    CHECK(a.relevant);
    CHECK(a.architectural_level == "Station");
    CHECK(a.metrics_before.sloc == 10);
    CHECK(a.metrics_after.mccabe == 3);
    REQUIRE(a.maturity.term_deltas.size() == 1);
    CHECK(a.maturity.term_deltas[0].term_id == "input-variable-added");
    CHECK(a.maturity.term_deltas[0].before_total == 9);
    CHECK(a.maturity.category_deltas.at(Criticality::Functional) == doctest::Approx(0.19));
    CHECK(!back.pou_results.at("FB_B").relevant);
}

TEST_CASE("append then load round trip") {
    TempDir dir;
    HistoryStore store((dir.path / "history.jsonl").string());
    store.append_record(record("c1", "FB_A", 0.95));
    store.append_record(record("c2", "FB_A", 0.81));
    auto all = store.load_all();
    REQUIRE(all.size() == 2);
    CHECK(all[0].changeset_id == "c1");
    CHECK(all[1].changeset_id == "c2");
    CHECK(store.has_changeset("c1"));
    CHECK(!store.has_changeset("c9"));
}

TEST_CASE("duplicate changeset id is rejected") {
    TempDir dir;
    HistoryStore store((dir.path / "history.jsonl").string());
    store.append_record(record("c1", "FB_A", 0.95));
    CHECK_THROWS_AS(store.append_record(record("c1", "FB_A", 0.80)), DuplicateIdError);
    CHECK(store.load_all().size() == 1);
}

TEST_CASE("load_history numbers relevant changes gap-free and excludes empties") {
    TempDir dir;
    HistoryStore store((dir.path / "history.jsonl").string());
    store.append_record(record("c1", "FB_A", 0.95));
    // comment-only edit: POU present but not relevant
    ChangesetRecord comment_only = record("c2", "FB_A", 1.0);
    comment_only.pou_results["FB_A"] = outcome(1.0, false);
    store.append_record(comment_only);
    store.append_record(record("c3", "FB_B", 0.70)); // different POU
    store.append_record(record("c4", "FB_A", 0.81));

    PouHistory h = store.load_history("FB_A");
    REQUIRE(h.entries.size() == 2);
    CHECK(h.entries[0].change_number == 1);
    CHECK(h.entries[0].changeset_id == "c1");
    CHECK(h.entries[1].change_number == 2);
    CHECK(h.entries[1].changeset_id == "c4");
    CHECK(h.entries[1].maturity.maturity == doctest::Approx(0.81));

    CHECK(store.load_history("FB_UNKNOWN").entries.empty());
    PouHistory hb = store.load_history("FB_B");
    REQUIRE(hb.entries.size() == 1);
    CHECK(hb.entries[0].change_number == 1);
}

TEST_CASE("query filters and category partitioning") {
    TempDir dir;
    HistoryStore store((dir.path / "history.jsonl").string());
    store.append_record(record("c1", "FB_A", 0.95, "BugFix", "Design", "2026-01-01T08:00:00Z"));
    store.append_record(record("c2", "FB_A", 0.85, "Feature", "StartUp", "2026-02-01T08:00:00Z"));
    store.append_record(record("c3", "FB_B", 0.75, "BugFix", "Operation", "2026-03-01T08:00:00Z"));
    store.append_record(record("c4", "FB_B", 0.65, "Other", "Operation", "2026-04-01T08:00:00Z"));

    QueryFilter bugfix;
    bugfix.category = "BugFix";
    auto bf = store.query(bugfix);
    REQUIRE(bf.size() == 2);
    CHECK(bf[0].changeset_id == "c1");
    CHECK(bf[1].changeset_id == "c3");

    QueryFilter all;
    CHECK(store.query(all).size() == 4);

    // partitioning: BugFix + not-BugFix covers everything exactly once
    std::size_t rest = 0;
    for (const char* cat : {"Feature", "Other", "Enhancement", "Development"}) {
        QueryFilter f;
        f.category = cat;
        rest += store.query(f).size();
    }
    CHECK(bf.size() + rest == 4);

    QueryFilter phase;
    phase.phase = "Operation";
    CHECK(store.query(phase).size() == 2);

    QueryFilter window;
    window.date_from = "2026-02-01";
    window.date_to = "2026-03-31";
    auto ranged = store.query(window);
    REQUIRE(ranged.size() == 2);
    CHECK(ranged[0].changeset_id == "c2");

    QueryFilter level;
    level.level = "Station";
    CHECK(store.query(level).size() == 4);
    level.level = "Machine";
    CHECK(store.query(level).empty());
}

TEST_CASE("synthetic corpus at the hundreds scale") {
    TempDir dir;
    HistoryStore store((dir.path / "history.jsonl").string());
    for (int i = 0; i < 856; ++i) {
        double maturity = 0.60 + 0.4 * ((i % 100) / 100.0);
        store.append_record(record("c" + std::to_string(i), "FB_SCALE", maturity,
                                   i % 3 == 0 ? "BugFix" : "Enhancement"));
    }
    CHECK(store.load_all().size() == 856);
    PouHistory h = store.load_history("FB_SCALE");
    REQUIRE(h.entries.size() == 856);
    CHECK(h.entries.back().change_number == 856);
    double sum = 0;
    for (const auto& e : h.entries) sum += e.maturity.maturity;
    double mean = sum / 856.0;
    CHECK(mean > 0.6);
    CHECK(mean < 1.0);
}

TEST_CASE("torn trailing line is ignored, intact records survive") {
    TempDir dir;
    std::string path = (dir.path / "history.jsonl").string();
    {
        HistoryStore store(path);
        store.append_record(record("c1", "FB_A", 0.95));
        store.append_record(record("c2", "FB_A", 0.85));
    }
    {
        // simulate a crash mid-append: partial JSON with no trailing newline
        std::ofstream out(path, std::ios::app | std::ios::binary);
        out << R"({"v":1,"changeset_id":"c3","timest)";
    }
    HistoryStore reopened(path);
    auto all = reopened.load_all();
    REQUIRE(all.size() == 2);
    CHECK(all[1].changeset_id == "c2");
    // the store stays usable and the next append lands on its own line
    reopened.append_record(record("c4", "FB_A", 0.75));
    CHECK(reopened.load_all().size() == 3);
    CHECK(reopened.has_changeset("c4"));
}

TEST_CASE("missing store file reads as empty") {
    TempDir dir;
    HistoryStore store((dir.path / "nonexistent.jsonl").string());
    CHECK(store.load_all().empty());
    CHECK(store.load_history("FB_A").entries.empty());
    CHECK(!store.has_changeset("c1"));
}

TEST_CASE("malformed line raises a store error") {
    TempDir dir;
    std::string path = (dir.path / "history.jsonl").string();
    {
        std::ofstream out(path, std::ios::binary);
        out << "not json at all\n";
    }
    HistoryStore store(path);
    CHECK_THROWS_AS(store.load_all(), StoreError);
}
