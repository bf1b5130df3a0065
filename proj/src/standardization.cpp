#include "transport/standardization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace transport {

namespace {

void check_weight_sum(const StandardizationWeights& weights) {
    Rat sum(0);
    for (const auto& [v, w] : weights.w) {
        if (w < Rat(0))
            throw WeightMismatch("negative weight for stratum " + v.key());
        sum += w;
    }
    if (std::abs(sum.to_double() - 1.0) > 1e-12)
        throw WeightMismatch("weights sum to " + sum.str() + ", not 1");
}

void check_alignment(const std::vector<StratumEffect>& effects,
                     const StandardizationWeights& weights) {
    if (effects.size() != weights.w.size())
        throw WeightMismatch("weights cover " + std::to_string(weights.w.size()) +
                             " strata, effects cover " +
                             std::to_string(effects.size()));
    for (const auto& e : effects)
        if (!weights.w.count(e.stratum))
            throw WeightMismatch("no weight for stratum " + e.stratum.key());
}

std::string weight_kind_name(WeightKind kind) {
    switch (kind) {
        case WeightKind::Prevalence: return "Pr(V=v|P=t)";
        case WeightKind::BaselineCases: return "Pr(V=v|Y0=1,P=t)";
        case WeightKind::BaselineNonCases: return "Pr(V=v|Y0=0,P=t)";
    }
    return "?";
}

void derive_measures(TransportEstimate& est, const Rat& r1, const Rat& r0) {
    est.target_risk1 = r1.to_double();
    est.target_risk0 = r0.to_double();
    for (MeasureKind kind : {MeasureKind::RD, MeasureKind::RR, MeasureKind::OR}) {
        try {
            est.measures.push_back({kind, effect_measure_value(kind, r1, r0)});
        } catch (const UndefinedMeasure& e) {
            est.warnings.push_back(e.what());
        }
    }
}

} // namespace

WeightKind weight_kind_for(MeasureKind kind) {
    switch (kind) {
        case MeasureKind::RD: return WeightKind::Prevalence;
        case MeasureKind::RR: return WeightKind::BaselineCases;
        case MeasureKind::OR:
            throw NonCollapsibleMeasure(
                "the odds ratio is not collapsible; approach 1 does not apply");
    }
    throw NonCollapsibleMeasure("unknown measure");
}

StandardizationWeights compute_weights(const PotentialOutcomeTable& table,
                                       WeightKind kind, const PopulationId& target) {
    StandardizationWeights out;
    out.kind = kind;
    std::map<Stratum, Rat> raw;
    Rat total(0);
    for (const auto& v : table.strata(target)) {
        Rat prev = table.stratum_weight(target, v);
        Rat w = prev;
        if (kind != WeightKind::Prevalence) {
            Rat r0 = table.counterfactual_risk(target, v, 0);
            w = prev * (kind == WeightKind::BaselineCases ? r0 : Rat(1) - r0);
        }
        raw[v] = w;
        total += w;
    }
    if (raw.empty())
        throw EmptyCell("population '" + target + "' has no strata");
    if (total == Rat(0))
        throw ZeroBaselineRisk("conditioning event for " + weight_kind_name(kind) +
                               " has probability 0 in population '" + target + "'");
    for (auto& [v, w] : raw) out.w[v] = w / total;
    return out;
}

StandardizationWeights compute_weights(const StratifiedCounts& counts,
                                       WeightKind kind, const PopulationId& target) {
    StandardizationWeights out;
    out.kind = kind;
    std::map<Stratum, Rat> raw;
    Rat total(0);
    long long pop_total = counts.population_total(target);
    if (pop_total == 0)
        throw EmptyCell("population '" + target + "' has no observations");
    for (const auto& v : counts.strata(target)) {
        Rat prev(counts.stratum_total(target, v), pop_total);
        Rat w = prev;
        if (kind != WeightKind::Prevalence) {
            Rat r0 = risk(counts, target, v, 0).rat();
            w = prev * (kind == WeightKind::BaselineCases ? r0 : Rat(1) - r0);
        }
        raw[v] = w;
        total += w;
    }
    if (total == Rat(0))
        throw ZeroBaselineRisk("conditioning event for " + weight_kind_name(kind) +
                               " has probability 0 in population '" + target + "'");
    for (auto& [v, w] : raw) out.w[v] = w / total;
    return out;
}

EffectMeasure standardize_measure(const std::vector<StratumEffect>& effects,
                                  const StandardizationWeights& weights,
                                  MeasureKind kind) {
    WeightKind expected = weight_kind_for(kind); // rejects OR
    if (weights.kind != expected)
        throw WeightMismatch("measure " + measure_name(kind) + " requires " +
                             weight_kind_name(expected) + " weights");
    check_weight_sum(weights);
    check_alignment(effects, weights);
    double value = 0.0;
    for (const auto& e : effects) {
        if (e.measure.kind != kind)
            throw WeightMismatch("stratum " + e.stratum.key() +
                                 " carries a different effect measure");
        value += e.measure.value * weights.w.at(e.stratum).to_double();
    }
    return EffectMeasure{kind, value};
}

TransportEstimate standardize_predicted_risk(
    const std::map<Stratum, Rat>& baseline_target,
    const std::vector<StratumEffect>& effects,
    const StandardizationWeights& target_weights) {
    if (target_weights.kind != WeightKind::Prevalence)
        throw WeightMismatch("approach 2 averages over Pr(V=v|P=t) weights");
    check_weight_sum(target_weights);
    check_alignment(effects, target_weights);

    TransportEstimate est;
    est.approach = "2";
    double risk1 = 0.0, risk0 = 0.0;
    MeasureKind kind = effects.empty() ? MeasureKind::RR : effects.front().measure.kind;
    for (const auto& e : effects) {
        auto it = baseline_target.find(e.stratum);
        if (it == baseline_target.end())
            throw WeightMismatch("no target baseline risk for stratum " +
                                 e.stratum.key());
        double p0 = it->second.to_double();
        double p1 = 0.0;
        switch (e.measure.kind) {
            case MeasureKind::RD: p1 = p0 + e.measure.value; break;
            case MeasureKind::RR: p1 = p0 * e.measure.value; break;
            case MeasureKind::OR: {
                if (p0 >= 1.0)
                    throw RiskOutOfRange("stratum " + e.stratum.key() +
                                         ": baseline risk 1 under the odds ratio");
                double odds = p0 / (1.0 - p0) * e.measure.value;
                p1 = odds / (1.0 + odds);
                break;
            }
        }
        if (p1 < 0.0 || p1 > 1.0)
            throw RiskOutOfRange("stratum " + e.stratum.key() + ": predicted risk " +
                                 std::to_string(p1) + " outside [0,1]");
        double w = target_weights.w.at(e.stratum).to_double();
        risk1 += p1 * w;
        risk0 += p0 * w;
    }
    est.target_risk1 = risk1;
    est.target_risk0 = risk0;
    est.assumptions = "conditional effect homogeneity on the " +
                      measure_name(kind) + " scale";
    try {
        if (kind == MeasureKind::RD)
            est.measures.push_back({kind, risk1 - risk0});
        else if (kind == MeasureKind::RR) {
            if (risk0 == 0.0) throw UndefinedMeasure("baseline risk is 0");
            est.measures.push_back({kind, risk1 / risk0});
        } else {
            if (risk0 <= 0.0 || risk0 >= 1.0 || risk1 <= 0.0 || risk1 >= 1.0)
                throw UndefinedMeasure("a marginal risk is at the boundary");
            est.measures.push_back(
                {kind, (risk1 / (1 - risk1)) / (risk0 / (1 - risk0))});
        }
    } catch (const UndefinedMeasure& e) {
        est.warnings.push_back(e.what());
    }
    return est;
}

namespace {

void check_positivity(const StratifiedCounts& counts, const PopulationId& source,
                      const std::vector<Stratum>& target_strata) {
    std::vector<std::string> missing;
    for (const auto& v : target_strata) {
        bool ok = counts.has_stratum(source, v);
        if (ok)
            for (int a = 0; a <= 1; ++a)
                if (counts.cell(source, v, a, 0) + counts.cell(source, v, a, 1) == 0)
                    ok = false;
        if (!ok) missing.push_back(v.key());
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& s : missing) list += (list.empty() ? "" : "; ") + s;
        throw PositivityViolation(
            "target strata without source support in both arms: " + list);
    }
}

} // namespace

TransportEstimate standardize_distribution(const StratifiedCounts& counts,
                                           const std::vector<std::string>& v_set,
                                           const PopulationId& target,
                                           const PopulationId& source) {
    StratifiedCounts c = counts.marginalize(v_set);
    auto target_strata = c.strata(target);
    if (target_strata.empty())
        throw EmptyCell("population '" + target + "' has no observations");
    check_positivity(c, source, target_strata);

    long long n_t = c.population_total(target);
    Rat risks[2] = {Rat(0), Rat(0)};
    for (const auto& v : target_strata) {
        Rat w(c.stratum_total(target, v), n_t);
        for (int a = 0; a <= 1; ++a)
            risks[a] += risk(c, source, v, a).rat() * w;
    }
    TransportEstimate est;
    est.approach = "3";
    est.assumptions = "conditional effect homogeneity in distribution "
                      "(S-ignorability given the standardization set)";
    derive_measures(est, risks[1], risks[0]);
    return est;
}

TransportEstimate ipw_estimate(const StratifiedCounts& counts,
                               const std::vector<std::string>& v_set,
                               const PopulationId& target,
                               const PopulationId& source) {
    StratifiedCounts c = counts.marginalize(v_set);
    auto target_strata = c.strata(target);
    if (target_strata.empty())
        throw EmptyCell("population '" + target + "' has no observations");
    check_positivity(c, source, target_strata);

    long long n_t = c.population_total(target);
    Rat risks[2];
    for (int a = 0; a <= 1; ++a) {
        // Weight for a source record in stratum v and arm a:
        // Pr(V=v|P=t) / Pr(V=v|P=s,A=a), normalized within the arm.
        long long n_arm = 0;
        for (const auto& v : c.strata(source))
            n_arm += c.cell(source, v, a, 0) + c.cell(source, v, a, 1);
        Rat num(0), den(0);
        for (const auto& v : target_strata) {
            long long arm_total = c.cell(source, v, a, 0) + c.cell(source, v, a, 1);
            Rat pv_t(c.stratum_total(target, v), n_t);
            Rat pv_s(arm_total, n_arm);
            Rat w = pv_t / pv_s;
            num += Rat(c.cell(source, v, a, 1)) * w;
            den += Rat(arm_total) * w;
        }
        risks[a] = num / den;
    }
    TransportEstimate est;
    est.approach = "ipw";
    est.assumptions = "conditional effect homogeneity in distribution "
                      "(S-ignorability given the standardization set)";
    derive_measures(est, risks[1], risks[0]);
    return est;
}

std::vector<StratumEffect> stratum_effects(const StratifiedCounts& counts,
                                           const PopulationId& source,
                                           MeasureKind kind) {
    std::vector<StratumEffect> out;
    for (const auto& v : counts.strata(source)) {
        Risk r1 = risk(counts, source, v, 1);
        Risk r0 = risk(counts, source, v, 0);
        out.push_back({v, effect_measure(kind, r1, r0)});
    }
    return out;
}

std::map<Stratum, Rat> target_baselines(const StratifiedCounts& counts,
                                        const PopulationId& target) {
    std::map<Stratum, Rat> out;
    for (const auto& v : counts.strata(target))
        out[v] = risk(counts, target, v, 0).rat();
    return out;
}

} // namespace transport
