#pragma once

// Turns an exact joint counterfactual table into stratified trial counts
// whose empirical risks and covariate shares equal the table quantities
// exactly (equal arm sizes per stratum, scaled to clear all denominators).

#include <numeric>

#include "transport/core.hpp"
#include "transport/table.hpp"

namespace transport::testing {

inline StratifiedCounts counts_from_table(const PotentialOutcomeTable& t) {
    long long scale = 1;
    for (const auto& p : t.populations()) {
        for (const auto& v : t.strata(p)) {
            Rat w = t.stratum_weight(p, v);
            Rat r1 = t.counterfactual_risk(p, v, 1);
            Rat r0 = t.counterfactual_risk(p, v, 0);
            for (const Rat& x : {w, w * r1, w * r0})
                scale = std::lcm(scale, x.den());
        }
    }
    StratifiedCounts c(t.covariates());
    for (const auto& p : t.populations()) {
        for (const auto& v : t.strata(p)) {
            Rat n = t.stratum_weight(p, v) * Rat(scale); // per-arm size
            for (int a = 0; a <= 1; ++a) {
                Rat events = n * t.counterfactual_risk(p, v, a);
                if (n.den() != 1 || events.den() != 1)
                    throw std::logic_error("count scaling failed");
                c.add(p, v, a, 1, events.num());
                c.add(p, v, a, 0, (n - events).num());
            }
        }
    }
    return c;
}

} // namespace transport::testing
