#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transport/core.hpp"
#include "transport/table.hpp"

namespace transport {

struct StratumEffect {
    Stratum stratum;
    EffectMeasure measure;
};

// Which conditional covariate distribution the weights represent.
enum class WeightKind {
    Prevalence,       // Pr(V=v | P=t)            — RD, approach 2/3 averaging
    BaselineCases,    // Pr(V=v | Y^0=1, P=t)     — RR and G
    BaselineNonCases, // Pr(V=v | Y^0=0, P=t)     — H
};

struct StandardizationWeights {
    WeightKind kind = WeightKind::Prevalence;
    std::map<Stratum, Rat> w; // non-negative, sums to 1
};

struct TransportEstimate {
    std::optional<double> target_risk1;
    std::optional<double> target_risk0;
    std::vector<EffectMeasure> measures;
    std::string approach;    // "1", "2", "3", "ipw"
    std::string assumptions; // validity condition being relied on
    std::vector<std::string> warnings;
};

WeightKind weight_kind_for(MeasureKind kind); // OR -> NonCollapsibleMeasure

// Weight computation is the single authority for measure-specific weights;
// see the per-kind definitions above.
StandardizationWeights compute_weights(const PotentialOutcomeTable& table,
                                       WeightKind kind, const PopulationId& target);
StandardizationWeights compute_weights(const StratifiedCounts& counts,
                                       WeightKind kind, const PopulationId& target);

// Approach 1: weighted average of the stratum effect measure. Collapsible
// measures only; weights must carry the measure's own kind.
EffectMeasure standardize_measure(const std::vector<StratumEffect>& effects,
                                  const StandardizationWeights& weights,
                                  MeasureKind kind);

// Approach 2: apply each stratum effect to the target baseline risk, then
// average the predicted risks over Pr(V=v | P=t). Valid for any measure.
TransportEstimate standardize_predicted_risk(
    const std::map<Stratum, Rat>& baseline_target,
    const std::vector<StratumEffect>& effects,
    const StandardizationWeights& target_weights);

// Approach 3: standardize both counterfactual risks from the source strata
// to the target covariate distribution.
TransportEstimate standardize_distribution(const StratifiedCounts& counts,
                                           const std::vector<std::string>& v_set,
                                           const PopulationId& target,
                                           const PopulationId& source = kStudy);

// Inverse-probability-weighted estimator; algebraically identical to
// approach 3 on count data.
TransportEstimate ipw_estimate(const StratifiedCounts& counts,
                               const std::vector<std::string>& v_set,
                               const PopulationId& target,
                               const PopulationId& source = kStudy);

// Helpers for assembling approach-1/2 inputs from count data.
std::vector<StratumEffect> stratum_effects(const StratifiedCounts& counts,
                                           const PopulationId& source,
                                           MeasureKind kind);
std::map<Stratum, Rat> target_baselines(const StratifiedCounts& counts,
                                        const PopulationId& target);

} // namespace transport
