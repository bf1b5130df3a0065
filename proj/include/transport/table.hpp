#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "transport/core.hpp"
#include "transport/rational.hpp"

namespace transport {

// Exact joint counterfactual distribution: mass on (population, stratum,
// y0, y1). Masses are rational; per-population masses normalize to 1 for
// probability tables (counts are also accepted and normalized on query).
class PotentialOutcomeTable {
public:
    PotentialOutcomeTable() = default;
    explicit PotentialOutcomeTable(std::vector<std::string> covariates)
        : covariates_(std::move(covariates)) {}

    const std::vector<std::string>& covariates() const { return covariates_; }

    void add(const PopulationId& p, const Stratum& v, int y0, int y1, const Rat& mass);

    Rat mass(const PopulationId& p, const Stratum& v, int y0, int y1) const;
    Rat stratum_mass(const PopulationId& p, const Stratum& v) const;
    Rat population_mass(const PopulationId& p) const;

    std::vector<PopulationId> populations() const;
    std::vector<Stratum> strata(const PopulationId& p) const;

    // Pr(V = v | P = p)
    Rat stratum_weight(const PopulationId& p, const Stratum& v) const;
    // Pr(Y^a = 1 | V = v, P = p); throws EmptyCell on zero stratum mass
    Rat counterfactual_risk(const PopulationId& p, const Stratum& v, int a) const;
    // Pr(Y^a = 1 | P = p)
    Rat marginal_counterfactual_risk(const PopulationId& p, int a) const;

    PotentialOutcomeTable marginalize(const std::vector<std::string>& keep) const;
    // Collapses all strata of one population into a single empty stratum.
    PotentialOutcomeTable pooled() const;

    const std::map<std::tuple<PopulationId, Stratum, int, int>, Rat>& cells() const {
        return cells_;
    }

private:
    std::vector<std::string> covariates_;
    std::map<std::tuple<PopulationId, Stratum, int, int>, Rat> cells_;
};

// CSV with header "population,<covariates...>,y0,y1,mass"; mass accepts
// fractions ("3/40") and decimals; duplicate keys summed.
PotentialOutcomeTable read_table_csv(std::istream& in);
PotentialOutcomeTable read_table_file(const std::string& path);
void write_table_csv(const PotentialOutcomeTable& table, std::ostream& out);

} // namespace transport
