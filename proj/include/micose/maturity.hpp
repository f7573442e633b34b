#pragma once

#include <map>
#include <string>
#include <vector>

#include "micose/catalog.hpp"
#include "micose/diff.hpp"

namespace micose {

enum class TrafficLight : std::uint8_t { Green, Yellow, Red };
enum class ScoreMode : std::uint8_t { Enhanced, Legacy };
enum class AggregationMode : std::uint8_t { Active, Catalog };

std::string_view to_string(TrafficLight c);

struct SizeFactors {
    double k_l = 1.0;
    double k_e = 0.0;
    int sloc_basis = 0;
};

struct TermDelta {
    std::string term_id;
    Criticality category;
    double delta = 0.0;
    double w = 0.0;
    double ratio = 0.0;
    int changed = 0;
    int before_total = 0;
};

struct Thresholds {
    double green = 0.90;
    double yellow = 0.70;
};

struct MaturityResult {
    double maturity = 1.0;
    int n = 0;
    std::vector<TermDelta> term_deltas;
    std::map<Criticality, double> category_deltas;
    TrafficLight color = TrafficLight::Green;
    SizeFactors size_factors;
    ScoreMode mode = ScoreMode::Enhanced;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear/exponential blend by POU size: small (<=150 SLOC) fully linear,
/// large (>=1000) fully exponential, linear interpolation between.
SizeFactors size_factors(int sloc);

/// delta = k_l*w*ratio + k_e*w*(1 - exp(-p*ratio))
double delta_enhanced(double ratio, double w, const SizeFactors& sf, double p);

/// The original unweighted linear term.
double delta_legacy(double ratio);

TrafficLight traffic_light(double maturity, const Thresholds& thresholds);

/// Maturity = 1 - (1/n) * sum(delta). Mode Active: n = nonzero-delta term
/// count; mode Catalog: n = catalog size.
MaturityResult aggregate(std::vector<TermDelta> term_deltas, AggregationMode mode,
                         const Catalog& catalog, const SizeFactors& sf,
                         const Thresholds& thresholds, ScoreMode score_mode);

/// Full pipeline step: change vector -> per-term deltas -> maturity.
MaturityResult score_change(const ChangeVector& cv, const Catalog& catalog,
                            AggregationMode mode, const Thresholds& thresholds,
                            ScoreMode score_mode);

} // namespace micose
