#pragma once

#include <map>
#include <string>

#include "transport/core.hpp"
#include "transport/standardization.hpp"
#include "transport/table.hpp"

namespace transport {

enum class CostIdentification { ExactFromJoint, MonotoneIncreasing, MonotoneDecreasing };
enum class MonotoneDirection { Increasing, Decreasing };

// G = Pr(Y^1=1 | Y^0=1), H = Pr(Y^1=0 | Y^0=0). Exact rationals so the
// transport identities can be checked without tolerance.
struct CostParams {
    Rat g;
    Rat h;
    CostIdentification identification = CostIdentification::ExactFromJoint;
};

struct MonotonicityBiasReport {
    double predicted_target_risk1 = 0.0;
    double true_target_risk1 = 0.0;
    double bias = 0.0;                 // |predicted - true|
    double off_diagonal_mass = 0.0;    // source mass violating the fitted direction
    double baseline_gap = 0.0;         // max_v |p0_source - p0_target|
};

CostParams cost_from_joint(const PotentialOutcomeTable& table, const PopulationId& p,
                           const Stratum& v);

CostParams cost_identify_monotone(const Risk& risk1, const Risk& risk0,
                                  MonotoneDirection direction);
CostParams cost_identify_monotone(const Rat& risk1, const Rat& risk0,
                                  MonotoneDirection direction);

// Pr(Y^1=1 | v, t) = G_v p0_v + (1 - H_v)(1 - p0_v), averaged over
// Pr(V=v | P=t). Always lands in [0,1].
TransportEstimate predict_target_risk(const std::map<Stratum, CostParams>& params,
                                      const std::map<Stratum, Rat>& baseline_target,
                                      const StandardizationWeights& target_weights);

// Marginal G with Pr(V=v|Y^0=1,P=t) weights; marginal H with
// Pr(V=v|Y^0=0,P=t) weights. Assumes conditional COST homogeneity.
CostParams standardize_cost(const std::map<Stratum, CostParams>& params,
                            const PotentialOutcomeTable& table,
                            const PopulationId& target);
CostParams standardize_cost(const std::map<Stratum, CostParams>& params,
                            const StratifiedCounts& counts,
                            const PopulationId& target);

// Applies monotone identification to the source strata of an exact joint
// table (direction fitted per stratum from the risk ordering) and reports
// the prediction error against the enumerated target risk.
MonotonicityBiasReport monotonicity_bias(const PotentialOutcomeTable& table,
                                         const PopulationId& source,
                                         const PopulationId& target,
                                         const std::vector<std::string>& v_set);

} // namespace transport
