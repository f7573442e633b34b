#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "micose/report.hpp"

namespace fs = std::filesystem;
using namespace micose;

namespace {

RepoSource make_source(const std::string& root, const std::string& kind,
                       const std::string& file_pattern) {
    RepoSource src;
    src.root = root;
    src.file_pattern = file_pattern;
    if (kind == "git") src.kind = RepoSource::Kind::VcsCli;
    else if (kind == "snapshot") src.kind = RepoSource::Kind::SnapshotDir;
    else src.kind = fs::is_directory(fs::path(root) / ".git") ? RepoSource::Kind::VcsCli
                                                              : RepoSource::Kind::SnapshotDir;
    return src;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MICOSE maturity analyzer for IEC 61131-3 Structured Text"};
    app.require_subcommand(1);

    std::string config_path, catalog_path, store_path, format = "text", mode;
    bool fail_on_red = false;
    if (const char* env = std::getenv("MICOSE_CONFIG")) config_path = env;

    app.add_option("--config", config_path, "run config file path");
    app.add_option("--catalog", catalog_path, "catalog config file path");
    app.add_option("--store", store_path, "history store path (JSON lines)");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    app.add_option("--mode", mode, "scoring mode")->check(CLI::IsMember({"enhanced", "legacy"}));
    app.add_flag("--fail-on-red", fail_on_red, "nonzero exit when any POU is red");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "compare two versions of one POU");
    std::string before_path, after_path;
    bool explain = false;
    analyze->add_option("before", before_path, "before version")->required();
    analyze->add_option("after", after_path, "after version")->required();
    analyze->add_flag("--explain", explain, "print per-term contributions");

    // history
    auto* history = app.add_subcommand("history", "per-POU maturity history (CSV + SVG)");
    std::string pou_name, out_prefix;
    history->add_option("pou", pou_name, "POU name")->required();
    history->add_option("--out", out_prefix, "output path prefix (default: <pou>_history)");

    // stats
    auto* stats = app.add_subcommand("stats", "grouped maturity statistics");
    std::string group_by = "category", scatter_csv;
    stats->add_option("--group-by", group_by, "category|level|phase|change-number");
    stats->add_option("--scatter", scatter_csv, "scatter CSV path (change-number mode)");

    // check-indicators
    auto* check = app.add_subcommand("check-indicators", "empirical indicator checks");

    // backfill
    auto* backfill = app.add_subcommand("backfill", "analyze a whole change history");
    std::string source_root = ".", source_kind = "auto";
    backfill->add_option("--source", source_root, "repository or snapshot directory");
    backfill->add_option("--kind", source_kind, "git|snapshot|auto")
        ->check(CLI::IsMember({"git", "snapshot", "auto"}));

    // hook
    auto* hook = app.add_subcommand("hook", "post-commit analysis of one revision");
    std::string rev, hook_source = ".", hook_kind = "auto", explicit_category;
    hook->add_option("--rev", rev, "revision id")->required();
    hook->add_option("--source", hook_source, "repository or snapshot directory");
    hook->add_option("--kind", hook_kind, "git|snapshot|auto")
        ->check(CLI::IsMember({"git", "snapshot", "auto"}));
    hook->add_option("--category", explicit_category,
                     "explicit change category (overrides message patterns)");

    // catalog
    auto* catalog_cmd = app.add_subcommand("catalog", "print the active change-term catalog");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = load_config(config_path);
        if (!catalog_path.empty()) config.catalog_path = catalog_path;
        if (!store_path.empty()) config.store_path = store_path;
        if (mode == "legacy") config.score_mode = ScoreMode::Legacy;
        else if (mode == "enhanced") config.score_mode = ScoreMode::Enhanced;
        if (fail_on_red) config.fail_on_red = true;
        Catalog catalog = load_catalog(config.catalog_path);

        if (*analyze)
            return cmd_analyze(before_path, after_path, catalog, config, format, explain,
                               std::cout, std::cerr);
        if (*history) {
            HistoryStore store(config.store_path);
            if (out_prefix.empty()) out_prefix = pou_name + "_history";
            return cmd_history(store, pou_name, config, out_prefix, std::cout, std::cerr);
        }
        if (*stats) {
            HistoryStore store(config.store_path);
            return cmd_stats(store, group_by, config, format, scatter_csv, std::cout,
                             std::cerr);
        }
        if (*check) {
            HistoryStore store(config.store_path);
            return cmd_check_indicators(store, config, std::cout);
        }
        if (*backfill) {
            HistoryStore store(config.store_path);
            RepoSource src = make_source(source_root, source_kind, config.file_pattern);
            return cmd_backfill(src, store, catalog, config, std::cout, std::cerr);
        }
        if (*hook) {
            HistoryStore store(config.store_path);
            RepoSource src = make_source(hook_source, hook_kind, config.file_pattern);
            HookOutcome ho = hook_run(src, rev, store, catalog, config, explicit_category);
            for (const auto& line : ho.summary) std::cout << line << "\n";
            for (const auto& d : ho.diagnostics) std::cerr << d << "\n";
            return ho.exit_status;
        }
        if (*catalog_cmd) {
            std::cout << format_catalog(catalog);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
