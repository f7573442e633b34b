#include "micose/maturity.hpp"

#include <algorithm>
#include <cmath>

namespace micose {

std::string_view to_string(TrafficLight c) {
    switch (c) {
    case TrafficLight::Green: return "green";
    case TrafficLight::Yellow: return "yellow";
    case TrafficLight::Red: return "red";
    }
    return "?";
}

SizeFactors size_factors(int sloc) {
    SizeFactors sf;
    sf.sloc_basis = sloc;
    if (sloc >= 1000) sf.k_e = 1.0;
    else if (sloc <= 150) sf.k_e = 0.0;
    else sf.k_e = static_cast<double>(sloc - 150) / 850.0;
    sf.k_l = 1.0 - sf.k_e;
    return sf;
}

double delta_enhanced(double ratio, double w, const SizeFactors& sf, double p) {
    return sf.k_l * w * ratio + sf.k_e * w * (1.0 - std::exp(-p * ratio));
}

double delta_legacy(double ratio) { return ratio; }

TrafficLight traffic_light(double maturity, const Thresholds& t) {
    if (!(t.green > t.yellow) || t.green <= 0.0 || t.green >= 1.0 ||
        t.yellow <= 0.0 || t.yellow >= 1.0)
        throw ConfigError("traffic-light thresholds must satisfy 0 < yellow < green < 1");
    if (maturity >= t.green) return TrafficLight::Green;
    if (maturity >= t.yellow) return TrafficLight::Yellow;
    return TrafficLight::Red;
}

MaturityResult aggregate(std::vector<TermDelta> term_deltas, AggregationMode mode,
                         const Catalog& catalog, const SizeFactors& sf,
                         const Thresholds& thresholds, ScoreMode score_mode) {
    MaturityResult res;
    res.size_factors = sf;
    res.mode = score_mode;

    double sum = 0.0;
    int active = 0;
    for (const auto& td : term_deltas) {
        if (!catalog.find(td.term_id))
            throw CatalogError("term delta from a different catalog: " + td.term_id);
        sum += td.delta;
        if (td.delta > 0.0) ++active;
        res.category_deltas[td.category] += td.delta;
    }

    res.n = mode == AggregationMode::Catalog ? static_cast<int>(catalog.terms.size()) : active;
    res.maturity = res.n > 0 ? 1.0 - sum / res.n : 1.0;
    res.maturity = std::clamp(res.maturity, 0.0, 1.0);
    res.term_deltas = std::move(term_deltas);
    res.color = traffic_light(res.maturity, thresholds);
    return res;
}

MaturityResult score_change(const ChangeVector& cv, const Catalog& catalog,
                            AggregationMode mode, const Thresholds& thresholds,
                            ScoreMode score_mode) {
    SizeFactors sf = size_factors(cv.sloc_before);
    std::vector<TermDelta> deltas;
    deltas.reserve(cv.counts.size());
    for (const auto& [id, count] : cv.counts) {
        const ChangeTerm& term = catalog.at(id);
        TermDelta td;
        td.term_id = id;
        td.category = term.category;
        td.ratio = change_ratio(count);
        td.w = term_weight(term, catalog);
        td.changed = count.changed;
        td.before_total = count.before_total;
        td.delta = score_mode == ScoreMode::Legacy
                       ? delta_legacy(td.ratio)
                       : delta_enhanced(td.ratio, td.w, sf, catalog.p);
        deltas.push_back(std::move(td));
    }
    return aggregate(std::move(deltas), mode, catalog, sf, thresholds, score_mode);
}

} // namespace micose
