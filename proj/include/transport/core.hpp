#pragma once

#include <compare>
#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "transport/errors.hpp"
#include "transport/rational.hpp"

namespace transport {

// Population labels. "s" is the study population, "t" the target; other
// labels are allowed (meta-analytic settings).
using PopulationId = std::string;

inline const PopulationId kStudy = "s";
inline const PopulationId kTarget = "t";

// One covariate stratum: assignments sorted by covariate name.
class Stratum {
public:
    Stratum() = default;
    explicit Stratum(std::vector<std::pair<std::string, int>> assignments);

    const std::vector<std::pair<std::string, int>>& assignments() const {
        return assignments_;
    }
    int level(const std::string& covariate) const;
    std::string key() const; // "V1=0,V2=1"; "-" for the empty stratum

    auto operator<=>(const Stratum&) const = default;

private:
    std::vector<std::pair<std::string, int>> assignments_;
};

enum class MeasureKind { RD, RR, OR };

std::string measure_name(MeasureKind kind);
MeasureKind measure_from_name(const std::string& name);

struct EffectMeasure {
    MeasureKind kind;
    double value;
};

// An exact empirical risk: events / (events + non-events).
struct Risk {
    long long num = 0;
    long long den = 1;

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    Rat rat() const { return Rat(num, den); }
};

// Observed cell counts keyed by (population, stratum, a, y).
class StratifiedCounts {
public:
    StratifiedCounts() = default;
    explicit StratifiedCounts(std::vector<std::string> covariates)
        : covariates_(std::move(covariates)) {}

    const std::vector<std::string>& covariates() const { return covariates_; }

    // Duplicate keys are summed.
    void add(const PopulationId& p, const Stratum& v, int a, int y, long long count);

    long long cell(const PopulationId& p, const Stratum& v, int a, int y) const;
    bool has_stratum(const PopulationId& p, const Stratum& v) const;

    std::vector<PopulationId> populations() const;
    std::vector<Stratum> strata(const PopulationId& p) const;
    long long stratum_total(const PopulationId& p, const Stratum& v) const;
    long long population_total(const PopulationId& p) const;

    // Collapses onto the given covariate subset by summing cells.
    StratifiedCounts marginalize(const std::vector<std::string>& keep) const;

    const std::map<std::tuple<PopulationId, Stratum, int, int>, long long>& cells() const {
        return cells_;
    }

private:
    std::vector<std::string> covariates_;
    std::map<std::tuple<PopulationId, Stratum, int, int>, long long> cells_;
};

Risk risk(const StratifiedCounts& counts, const PopulationId& p, const Stratum& v, int a);
Risk marginal_risk(const StratifiedCounts& counts, const PopulationId& p, int a);

EffectMeasure effect_measure(MeasureKind kind, const Risk& risk1, const Risk& risk0);
// Same definitions on exact probabilities (used by table-based oracles).
double effect_measure_value(MeasureKind kind, const Rat& r1, const Rat& r0);

// CSV with header "population,<covariates...>,a,y,count".
StratifiedCounts read_counts_csv(std::istream& in);
StratifiedCounts read_counts_file(const std::string& path);
void write_counts_csv(const StratifiedCounts& counts, std::ostream& out);

} // namespace transport
