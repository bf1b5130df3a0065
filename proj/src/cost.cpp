#include "transport/cost.hpp"

#include <cmath>

namespace transport {

CostParams cost_from_joint(const PotentialOutcomeTable& table, const PopulationId& p,
                           const Stratum& v) {
    Rat m00 = table.mass(p, v, 0, 0);
    Rat m01 = table.mass(p, v, 0, 1);
    Rat m10 = table.mass(p, v, 1, 0);
    Rat m11 = table.mass(p, v, 1, 1);
    Rat cases = m10 + m11;     // Pr(Y^0 = 1)
    Rat noncases = m00 + m01;  // Pr(Y^0 = 0)
    if (cases == Rat(0))
        throw DegenerateBaseline("Pr(Y^0=1) = 0 in population '" + p +
                                 "', stratum " + v.key() + "; G undefined");
    if (noncases == Rat(0))
        throw DegenerateBaseline("Pr(Y^0=0) = 0 in population '" + p +
                                 "', stratum " + v.key() + "; H undefined");
    return CostParams{m11 / cases, m00 / noncases, CostIdentification::ExactFromJoint};
}

CostParams cost_identify_monotone(const Rat& risk1, const Rat& risk0,
                                  MonotoneDirection direction) {
    if (direction == MonotoneDirection::Increasing) {
        if (risk1 < risk0)
            throw MonotonicityContradicted(
                "risk under treatment " + risk1.str() + " < baseline risk " +
                risk0.str() + " contradicts a monotone increasing effect");
        if (risk0 == Rat(1))
            throw DegenerateBaseline("baseline risk 1: H not identified");
        // zero (y0=1, y1=0) cell forces G = 1 and H = (1-r1)/(1-r0)
        return CostParams{Rat(1), (Rat(1) - risk1) / (Rat(1) - risk0),
                          CostIdentification::MonotoneIncreasing};
    }
    if (risk1 > risk0)
        throw MonotonicityContradicted(
            "risk under treatment " + risk1.str() + " > baseline risk " +
            risk0.str() + " contradicts a monotone decreasing effect");
    if (risk0 == Rat(0))
        throw DegenerateBaseline("baseline risk 0: G not identified");
    // zero (y0=0, y1=1) cell forces H = 1 and G = r1/r0
    return CostParams{risk1 / risk0, Rat(1),
                      CostIdentification::MonotoneDecreasing};
}

CostParams cost_identify_monotone(const Risk& risk1, const Risk& risk0,
                                  MonotoneDirection direction) {
    return cost_identify_monotone(risk1.rat(), risk0.rat(), direction);
}

TransportEstimate predict_target_risk(const std::map<Stratum, CostParams>& params,
                                      const std::map<Stratum, Rat>& baseline_target,
                                      const StandardizationWeights& target_weights) {
    if (target_weights.kind != WeightKind::Prevalence)
        throw WeightMismatch("COST prediction averages over Pr(V=v|P=t) weights");
    if (params.size() != target_weights.w.size())
        throw WeightMismatch("weights cover " +
                             std::to_string(target_weights.w.size()) +
                             " strata, COST parameters cover " +
                             std::to_string(params.size()));
    Rat sum(0);
    for (const auto& [v, w] : target_weights.w) sum += w;
    if (std::abs(sum.to_double() - 1.0) > 1e-12)
        throw WeightMismatch("weights sum to " + sum.str() + ", not 1");

    // Exact accumulation as long as the denominators fit; count-derived
    // inputs can have large coprime denominators, so fall back to double.
    Rat risk1(0), risk0(0);
    double risk1_d = 0.0, risk0_d = 0.0;
    bool exact = true;
    for (const auto& [v, gp] : params) {
        auto wit = target_weights.w.find(v);
        if (wit == target_weights.w.end())
            throw WeightMismatch("no weight for stratum " + v.key());
        auto bit = baseline_target.find(v);
        if (bit == baseline_target.end())
            throw WeightMismatch("no target baseline risk for stratum " + v.key());
        const Rat& p0 = bit->second;
        double g = gp.g.to_double(), h = gp.h.to_double(), b = p0.to_double();
        double w = wit->second.to_double();
        risk1_d += (g * b + (1.0 - h) * (1.0 - b)) * w;
        risk0_d += b * w;
        if (exact) {
            try {
                Rat p1 = gp.g * p0 + (Rat(1) - gp.h) * (Rat(1) - p0);
                risk1 += p1 * wit->second;
                risk0 += p0 * wit->second;
            } catch (const std::overflow_error&) {
                exact = false;
            }
        }
    }
    TransportEstimate est;
    est.approach = "cost";
    est.assumptions = "conditional COST homogeneity (shared G,H across populations)";
    est.target_risk1 = exact ? risk1.to_double() : risk1_d;
    est.target_risk0 = exact ? risk0.to_double() : risk0_d;
    auto from_doubles = [](MeasureKind kind, double r1, double r0) {
        if (kind == MeasureKind::RD) return r1 - r0;
        if (kind == MeasureKind::RR) {
            if (r0 == 0.0)
                throw UndefinedMeasure("risk ratio undefined: baseline risk is 0");
            return r1 / r0;
        }
        if (r0 <= 0.0 || r0 >= 1.0 || r1 <= 0.0 || r1 >= 1.0)
            throw UndefinedMeasure(
                "odds ratio undefined: a risk is at the boundary");
        return (r1 / (1.0 - r1)) / (r0 / (1.0 - r0));
    };
    for (MeasureKind kind : {MeasureKind::RD, MeasureKind::RR, MeasureKind::OR}) {
        try {
            double value;
            if (exact) {
                try {
                    value = effect_measure_value(kind, risk1, risk0);
                } catch (const std::overflow_error&) {
                    value = from_doubles(kind, risk1.to_double(), risk0.to_double());
                }
            } else {
                value = from_doubles(kind, risk1_d, risk0_d);
            }
            est.measures.push_back({kind, value});
        } catch (const UndefinedMeasure& e) {
            est.warnings.push_back(e.what());
        }
    }
    return est;
}

namespace {

// nearest dyadic rational; used only when exact accumulation overflows
Rat dyadic_approx(double x) {
    const long long den = 1LL << 50;
    return Rat(static_cast<long long>(std::llround(x * double(den))), den);
}

CostParams standardize_cost_impl(const std::map<Stratum, CostParams>& params,
                                 const StandardizationWeights& gw,
                                 const StandardizationWeights& hw) {
    Rat g(0), h(0);
    double gd = 0.0, hd = 0.0;
    bool exact = true;
    for (const auto& [v, gp] : params) {
        auto git = gw.w.find(v);
        auto hit = hw.w.find(v);
        if (git == gw.w.end() || hit == hw.w.end())
            throw WeightMismatch("no weight for stratum " + v.key());
        gd += gp.g.to_double() * git->second.to_double();
        hd += gp.h.to_double() * hit->second.to_double();
        if (exact) {
            try {
                g += gp.g * git->second;
                h += gp.h * hit->second;
            } catch (const std::overflow_error&) {
                exact = false;
            }
        }
    }
    if (!exact) {
        g = dyadic_approx(gd);
        h = dyadic_approx(hd);
    }
    return CostParams{g, h, CostIdentification::ExactFromJoint};
}

} // namespace

CostParams standardize_cost(const std::map<Stratum, CostParams>& params,
                            const PotentialOutcomeTable& table,
                            const PopulationId& target) {
    return standardize_cost_impl(
        params, compute_weights(table, WeightKind::BaselineCases, target),
        compute_weights(table, WeightKind::BaselineNonCases, target));
}

CostParams standardize_cost(const std::map<Stratum, CostParams>& params,
                            const StratifiedCounts& counts,
                            const PopulationId& target) {
    return standardize_cost_impl(
        params, compute_weights(counts, WeightKind::BaselineCases, target),
        compute_weights(counts, WeightKind::BaselineNonCases, target));
}

MonotonicityBiasReport monotonicity_bias(const PotentialOutcomeTable& table,
                                         const PopulationId& source,
                                         const PopulationId& target,
                                         const std::vector<std::string>& v_set) {
    PotentialOutcomeTable t = table.marginalize(v_set);
    MonotonicityBiasReport rep;
    Rat predicted(0), off_mass(0);
    double gap = 0.0;
    for (const auto& v : t.strata(target)) {
        Rat r1s = t.counterfactual_risk(source, v, 1);
        Rat r0s = t.counterfactual_risk(source, v, 0);
        auto dir = r1s >= r0s ? MonotoneDirection::Increasing
                              : MonotoneDirection::Decreasing;
        CostParams gp = cost_identify_monotone(r1s, r0s, dir);
        Rat p0t = t.counterfactual_risk(target, v, 0);
        Rat p1 = gp.g * p0t + (Rat(1) - gp.h) * (Rat(1) - p0t);
        Rat w = t.stratum_weight(target, v);
        predicted += p1 * w;

        // mass in the cell that the fitted direction assumes empty
        Rat bad = dir == MonotoneDirection::Increasing ? t.mass(source, v, 1, 0)
                                                       : t.mass(source, v, 0, 1);
        off_mass += bad / t.population_mass(source);
        gap = std::max(gap, std::abs((r0s - p0t).to_double()));
    }
    Rat truth = t.marginal_counterfactual_risk(target, 1);
    rep.predicted_target_risk1 = predicted.to_double();
    rep.true_target_risk1 = truth.to_double();
    rep.bias = std::abs((predicted - truth).to_double());
    rep.off_diagonal_mass = off_mass.to_double();
    rep.baseline_gap = gap;
    return rep;
}

} // namespace transport
