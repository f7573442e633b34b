#include "micose/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "micose/parser.hpp"

namespace micose {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double population_sigma(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

namespace {

std::string fmt(double v, int digits = 6) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

std::string fmt_pct(std::optional<double> pct) {
    if (!pct) return "n/a";
    double p = *pct * 100.0;
    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    if (p > 0.05) os << "+" << p << "%";
    else if (p < -0.05) os << p << "%";
    else os << "0.0%";
    return os.str();
}

Pou parse_single(const std::string& path, const RunConfig& config) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw VcsError("cannot open: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = decode_text(buf.str(), config.latin1_fallback);
    auto chunks = split_pous(text);
    if (chunks.empty()) throw ParseError(path + ": no POU found");
    if (chunks.size() > 1) throw MultiPouError(path + ": multiple POUs; split first");
    return parse_pou(chunks[0]);
}

struct Sample {
    double maturity;
    std::string category, level, phase, pou, changeset_id;
};

std::vector<Sample> relevant_samples(const HistoryStore& store) {
    std::vector<Sample> out;
    for (const auto& r : store.load_all())
        for (const auto& [name, o] : r.pou_results)
            if (o.relevant)
                out.push_back({o.maturity.maturity, r.category, o.architectural_level,
                               r.lifecycle_phase, name, r.changeset_id});
    return out;
}

} // namespace

int cmd_analyze(const std::string& before_path, const std::string& after_path,
                const Catalog& catalog, const RunConfig& config, const std::string& format,
                bool explain, std::ostream& out, std::ostream& err) {
    Pou before, after;
    try {
        before = parse_single(before_path, config);
        after = parse_single(after_path, config);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    for (const Pou* p : {&before, &after})
        for (const auto& d : p->diagnostics)
            err << "diagnostic: line " << d.line << ": " << d.message << "\n";
    if (before.name != after.name) {
        err << "error: POU name mismatch: " << before.name << " vs " << after.name << "\n";
        return 1;
    }

    VersionPair pair{before, after, after.name};
    ChangeVector cv = count_term_changes(pair, catalog);
    MaturityResult mr =
        score_change(cv, catalog, config.aggregation, config.thresholds, config.score_mode);
    ClassicMetrics mb = classic_metrics(before);
    ClassicMetrics ma = classic_metrics(after);

    if (format == "json") {
        nlohmann::json terms = nlohmann::json::array();
        for (const auto& td : mr.term_deltas)
            terms.push_back({{"id", td.term_id},
                             {"category", std::string(to_string(td.category))},
                             {"changed", td.changed},
                             {"before", td.before_total},
                             {"ratio", td.ratio},
                             {"w", td.w},
                             {"delta", td.delta}});
        nlohmann::json j = {
            {"pou", after.name},
            {"maturity", mr.maturity},
            {"color", std::string(to_string(mr.color))},
            {"n", mr.n},
            {"k_l", mr.size_factors.k_l},
            {"k_e", mr.size_factors.k_e},
            {"terms", terms},
            {"metrics",
             {{"sloc", {mb.sloc, ma.sloc}},
              {"mccabe", {mb.mccabe, ma.mccabe}},
              {"halstead_difficulty", {mb.halstead_difficulty, ma.halstead_difficulty}},
              {"fan_out", {mb.fan_out, ma.fan_out}}}}};
        out << j.dump(2) << "\n";
    } else if (format == "csv") {
        out << "term,category,changed,before,ratio,w,delta\n";
        for (const auto& td : mr.term_deltas)
            out << td.term_id << "," << to_string(td.category) << "," << td.changed << ","
                << td.before_total << "," << fmt(td.ratio) << "," << fmt(td.w) << ","
                << fmt(td.delta) << "\n";
    } else {
        out << "POU " << after.name << " (" << to_string(after.kind) << ")\n";
        out << "size factors: k_l=" << fmt(mr.size_factors.k_l, 4)
            << " k_e=" << fmt(mr.size_factors.k_e, 4) << " (SLOC basis "
            << mr.size_factors.sloc_basis << ")\n\n";
        if (mr.term_deltas.empty()) {
            out << "no metric-relevant change\n";
        } else {
            out << std::left << std::setw(40) << "term" << std::setw(12) << "category"
                << std::right << std::setw(8) << "changed" << std::setw(8) << "before"
                << std::setw(9) << "ratio" << std::setw(8) << "w" << std::setw(10)
                << "delta" << "\n";
            for (const auto& td : mr.term_deltas)
                out << std::left << std::setw(40) << td.term_id << std::setw(12)
                    << to_string(td.category) << std::right << std::setw(8) << td.changed
                    << std::setw(8) << td.before_total << std::setw(9) << fmt(td.ratio, 4)
                    << std::setw(8) << fmt(td.w, 3) << std::setw(10) << fmt(td.delta, 5)
                    << "\n";
        }
        out << "\ncategory sums:\n";
        for (const auto& [c, d] : mr.category_deltas)
            out << "  " << to_string(c) << ": " << fmt(d, 5) << "\n";
        out << "\nmaturity: " << fmt(mr.maturity, 3) << " [" << to_string(mr.color)
            << "] (n=" << mr.n << ")\n\n";
        out << "classic metrics            before      after   difference\n";
        auto row = [&](const std::string& name, double b, double a) {
            out << std::left << std::setw(24) << name << std::right << std::setw(11)
                << fmt(b, 2) << std::setw(11) << fmt(a, 2) << std::setw(13)
                << fmt_pct(percent_change(b, a)) << "\n";
        };
        row("Lines of Code", mb.sloc, ma.sloc);
        row("McCabe Complexity", mb.mccabe, ma.mccabe);
        row("Halstead Difficulty", mb.halstead_difficulty, ma.halstead_difficulty);
        row("Fan-Out", mb.fan_out, ma.fan_out);
        if (explain) {
            out << "\nper-term contribution to (1 - maturity):\n";
            for (const auto& td : mr.term_deltas)
                out << "  " << td.term_id << ": delta " << fmt(td.delta, 5) << " / n "
                    << mr.n << " = " << fmt(mr.n > 0 ? td.delta / mr.n : 0.0, 5) << "\n";
        }
    }
    return before.diagnostics.empty() && after.diagnostics.empty() ? 0 : 1;
}

namespace {

std::string svg_history(const PouHistory& hist, const Thresholds& thresholds) {
    const int bar_w = 24, gap = 8, chart_h = 220, margin = 50;
    const int n = static_cast<int>(hist.entries.size());
    const int width = margin * 2 + n * (bar_w + gap);
    const int height = chart_h + 110;

    // vertical scale for stacked deltas
    double max_delta = 0.0;
    for (const auto& e : hist.entries) {
        double total = 0.0;
        for (const auto& [_, d] : e.maturity.category_deltas) total += d;
        max_delta = std::max(max_delta, total);
    }
    if (max_delta <= 0.0) max_delta = 1.0;

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << margin << "\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">"
      << hist.pou_name << " maturity history</text>\n";

    auto color_of = [](Criticality c) {
        switch (c) {
        case Criticality::Functional: return "#c0392b";
        case Criticality::Structural: return "#e67e22";
        case Criticality::Operator: return "#f1c40f";
        }
        return "#888888";
    };

    // stacked bars of category deltas
    for (int i = 0; i < n; ++i) {
        const auto& e = hist.entries[static_cast<std::size_t>(i)];
        int x = margin + i * (bar_w + gap);
        double y = 30 + chart_h;
        for (Criticality c :
             {Criticality::Operator, Criticality::Structural, Criticality::Functional}) {
            auto it = e.maturity.category_deltas.find(c);
            if (it == e.maturity.category_deltas.end() || it->second <= 0.0) continue;
            double h = it->second / max_delta * chart_h;
            y -= h;
            s << "<rect x=\"" << x << "\" y=\"" << fmt(y, 2) << "\" width=\"" << bar_w
              << "\" height=\"" << fmt(h, 2) << "\" fill=\"" << color_of(c) << "\"/>\n";
        }
        s << "<text x=\"" << x + bar_w / 2 << "\" y=\"" << 30 + chart_h + 16
          << "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">"
          << e.change_number << "</text>\n";
    }

    // maturity line, 0..1 over the chart height
    s << "<polyline fill=\"none\" stroke=\"#2c3e50\" stroke-width=\"2\" points=\"";
    for (int i = 0; i < n; ++i) {
        const auto& e = hist.entries[static_cast<std::size_t>(i)];
        int x = margin + i * (bar_w + gap) + bar_w / 2;
        double y = 30 + chart_h - e.maturity.maturity * chart_h;
        s << x << "," << fmt(y, 2) << " ";
    }
    s << "\"/>\n";

    // traffic-light markers per change
    for (int i = 0; i < n; ++i) {
        const auto& e = hist.entries[static_cast<std::size_t>(i)];
        int x = margin + i * (bar_w + gap) + bar_w / 2;
        double y = 30 + chart_h - e.maturity.maturity * chart_h;
        const char* fill = e.maturity.color == TrafficLight::Green ? "#27ae60"
                         : e.maturity.color == TrafficLight::Yellow ? "#f39c12"
                                                                    : "#c0392b";
        s << "<circle cx=\"" << x << "\" cy=\"" << fmt(y, 2) << "\" r=\"4\" fill=\"" << fill
          << "\"/>\n";
    }

    // legend
    int ly = 30 + chart_h + 40;
    s << "<text x=\"" << margin << "\" y=\"" << ly
      << "\" font-family=\"sans-serif\" font-size=\"11\">legend: line = maturity (green \xe2\x89\xa5 "
      << fmt(thresholds.green, 2) << ", yellow \xe2\x89\xa5 " << fmt(thresholds.yellow, 2)
      << "); bars = per-category delta</text>\n";
    int lx = margin;
    for (Criticality c :
         {Criticality::Functional, Criticality::Structural, Criticality::Operator}) {
        s << "<rect x=\"" << lx << "\" y=\"" << ly + 10 << "\" width=\"12\" height=\"12\" fill=\""
          << color_of(c) << "\"/>\n";
        s << "<text x=\"" << lx + 16 << "\" y=\"" << ly + 20
          << "\" font-family=\"sans-serif\" font-size=\"11\">" << to_string(c) << "</text>\n";
        lx += 110;
    }
    s << "</svg>\n";
    return s.str();
}

} // namespace

int cmd_history(const HistoryStore& store, const std::string& pou, const RunConfig& config,
                const std::string& out_prefix, std::ostream& out, std::ostream& err) {
    PouHistory hist = store.load_history(pou);

    std::string csv_path = out_prefix + ".csv";
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) {
        err << "error: cannot write " << csv_path << "\n";
        return 1;
    }
    csv << "change_number,changeset_id,maturity,delta_functional,delta_structural,"
           "delta_operator,count_functional,count_structural,count_operator\n";
    for (const auto& e : hist.entries) {
        std::map<Criticality, int> counts;
        for (const auto& td : e.maturity.term_deltas) counts[td.category] += td.changed;
        auto delta = [&](Criticality c) {
            auto it = e.maturity.category_deltas.find(c);
            return it == e.maturity.category_deltas.end() ? 0.0 : it->second;
        };
        csv << e.change_number << "," << e.changeset_id << "," << fmt(e.maturity.maturity, 9)
            << "," << fmt(delta(Criticality::Functional), 9) << ","
            << fmt(delta(Criticality::Structural), 9) << ","
            << fmt(delta(Criticality::Operator), 9) << "," << counts[Criticality::Functional]
            << "," << counts[Criticality::Structural] << "," << counts[Criticality::Operator]
            << "\n";
    }
    csv.close();
    out << "wrote " << csv_path << " (" << hist.entries.size() << " changes)\n";

    if (!hist.entries.empty()) {
        std::string svg_path = out_prefix + ".svg";
        std::ofstream svg(svg_path, std::ios::binary);
        svg << svg_history(hist, config.thresholds);
        out << "wrote " << svg_path << "\n";
    }
    return 0;
}

int cmd_stats(const HistoryStore& store, const std::string& group_by, const RunConfig&,
              const std::string& format, const std::string& scatter_csv,
              std::ostream& out, std::ostream& err) {
    auto samples = relevant_samples(store);

    std::map<std::string, std::vector<double>> groups;
    if (group_by == "category") {
        for (const auto& s : samples) groups[s.category].push_back(s.maturity);
    } else if (group_by == "level") {
        for (const auto& s : samples)
            if (!s.level.empty()) groups[s.level].push_back(s.maturity);
    } else if (group_by == "phase") {
        for (const auto& s : samples)
            if (!s.phase.empty()) groups[s.phase].push_back(s.maturity);
    } else if (group_by == "change-number") {
        std::set<std::string> pous;
        for (const auto& s : samples) pous.insert(s.pou);
        std::vector<std::pair<int, double>> scatter;
        for (const auto& p : pous)
            for (const auto& e : store.load_history(p).entries) {
                groups[std::to_string(e.change_number)].push_back(e.maturity.maturity);
                scatter.emplace_back(e.change_number, e.maturity.maturity);
            }
        if (!scatter_csv.empty()) {
            std::ofstream f(scatter_csv, std::ios::binary);
            f << "change_number,maturity\n";
            std::sort(scatter.begin(), scatter.end());
            for (auto [n, m] : scatter) f << n << "," << fmt(m, 9) << "\n";
            out << "wrote " << scatter_csv << "\n";
        }
        int max_n = 0;
        for (auto [n, _] : scatter) max_n = std::max(max_n, n);
        std::vector<double> first_half, second_half;
        for (auto [n, m] : scatter)
            (n <= max_n / 2 ? first_half : second_half).push_back(m);
        out << "variance first half: " << fmt(std::pow(population_sigma(first_half), 2), 9)
            << ", second half: " << fmt(std::pow(population_sigma(second_half), 2), 9)
            << "\n";
    } else {
        err << "usage error: unknown group key '" << group_by
            << "' (category|level|phase|change-number)\n";
        return 2;
    }

    if (format == "csv") out << "group,count,mean,sigma\n";
    else out << std::left << std::setw(20) << "group" << std::right << std::setw(8) << "count"
             << std::setw(14) << "mean" << std::setw(14) << "sigma" << "\n";
    for (const auto& [key, xs] : groups) {
        if (format == "csv")
            out << key << "," << xs.size() << "," << fmt(mean(xs), 9) << ","
                << fmt(population_sigma(xs), 9) << "\n";
        else
            out << std::left << std::setw(20) << key << std::right << std::setw(8) << xs.size()
                << std::setw(14) << fmt(mean(xs), 9) << std::setw(14)
                << fmt(population_sigma(xs), 9) << "\n";
    }
    return 0;
}

namespace {

struct Verdict {
    std::string status; // HOLDS / VIOLATED / INSUFFICIENT-DATA
    std::string detail;
};

Verdict ordered_means(const std::vector<std::string>& order,
                      const std::map<std::string, std::vector<double>>& groups) {
    std::vector<std::pair<std::string, double>> present;
    for (const auto& key : order) {
        auto it = groups.find(key);
        if (it != groups.end() && !it->second.empty())
            present.emplace_back(key, mean(it->second));
    }
    std::string detail;
    for (const auto& [k, m] : present)
        detail += (detail.empty() ? "" : ", ") + k + "=" + fmt(m, 4);
    if (present.size() < 2) return {"INSUFFICIENT-DATA", detail};
    for (std::size_t i = 1; i < present.size(); ++i)
        if (!(present[i - 1].second > present[i].second)) return {"VIOLATED", detail};
    return {"HOLDS", detail};
}

} // namespace

int cmd_check_indicators(const HistoryStore& store, const RunConfig&, std::ostream& out) {
    auto records = store.load_all();

    // change scope = 1 - maturity, per relevant POU result
    std::map<std::string, std::vector<double>> by_level, by_phase, by_category;
    std::map<std::string, std::vector<double>> share_by_phase;
    std::set<std::string> pou_names;

    for (const auto& r : records) {
        for (const auto& [name, o] : r.pou_results) {
            if (!o.relevant) continue;
            pou_names.insert(name);
            double scope = 1.0 - o.maturity.maturity;
            if (!o.architectural_level.empty()) by_level[o.architectural_level].push_back(scope);
            if (!r.lifecycle_phase.empty()) by_phase[r.lifecycle_phase].push_back(scope);
            by_category[r.category].push_back(scope);
            double total = 0.0, functional = 0.0;
            for (const auto& [c, d] : o.maturity.category_deltas) {
                total += d;
                if (c == Criticality::Functional) functional += d;
            }
            if (total > 0.0 && !r.lifecycle_phase.empty())
                share_by_phase[r.lifecycle_phase].push_back(functional / total);
        }
    }

    // (2) higher architectural levels see larger change scopes
    Verdict v2 = ordered_means(
        {kArchLevels[0], kArchLevels[1], kArchLevels[2], kArchLevels[3], kArchLevels[4]},
        by_level);
    out << "indicator (2) level-ordering: " << v2.status
        << " (mean change scope by level: " << v2.detail << ")\n";

    // (3) change scope decreases along the lifecycle
    Verdict v3 = ordered_means({"Design", "StartUp", "Operation"}, by_phase);
    out << "indicator (3) lifecycle-scope: " << v3.status
        << " (mean change scope by phase: " << v3.detail << ")\n";

    // (4) feature work changes more than bug fixing
    {
        auto f = by_category.find("Feature");
        auto b = by_category.find("BugFix");
        if (f == by_category.end() || f->second.empty() || b == by_category.end() ||
            b->second.empty()) {
            out << "indicator (4) category-scope: INSUFFICIENT-DATA\n";
        } else {
            double mf = mean(f->second), mb = mean(b->second);
            out << "indicator (4) category-scope: " << (mf > mb ? "HOLDS" : "VIOLATED")
                << " (Feature=" << fmt(mf, 4) << ", BugFix=" << fmt(mb, 4) << ")\n";
        }
    }

    // (5) later changes to a POU are smaller than earlier ones
    {
        std::vector<std::pair<int, double>> points;
        int max_n = 0;
        for (const auto& p : pou_names)
            for (const auto& e : store.load_history(p).entries) {
                points.emplace_back(e.change_number, 1.0 - e.maturity.maturity);
                max_n = std::max(max_n, e.change_number);
            }
        if (max_n < 2) {
            out << "indicator (5) change-number: INSUFFICIENT-DATA\n";
        } else {
            std::vector<double> early, late;
            for (auto [n, s] : points) (n <= max_n / 2 ? early : late).push_back(s);
            if (early.empty() || late.empty()) {
                out << "indicator (5) change-number: INSUFFICIENT-DATA\n";
            } else {
                double me = mean(early), ml = mean(late);
                out << "indicator (5) change-number: " << (ml < me ? "HOLDS" : "VIOLATED")
                    << " (early=" << fmt(me, 4) << ", late=" << fmt(ml, 4) << ")\n";
            }
        }
    }

    // (6) functional share of changes decreases along the lifecycle
    Verdict v6 = ordered_means({"Design", "StartUp", "Operation"}, share_by_phase);
    out << "indicator (6) functional-share: " << v6.status
        << " (mean functional share by phase: " << v6.detail << ")\n";

    return 0;
}

int cmd_backfill(const RepoSource& source, HistoryStore& store, const Catalog& catalog,
                 const RunConfig& config, std::ostream& out, std::ostream& err) {
    int appended = 0;
    for (const auto& rev : list_revisions(source)) {
        if (store.has_changeset(rev.id)) continue;
        try {
            HookOutcome ho = hook_run(source, rev.id, store, catalog, config);
            for (const auto& d : ho.diagnostics) err << rev.id << ": " << d << "\n";
            if (ho.appended) ++appended;
        } catch (const std::exception& e) {
            err << rev.id << ": failed (" << e.what() << "), continuing\n";
        }
    }
    out << "backfill: " << appended << " new records\n";
    return 0;
}

} // namespace micose
