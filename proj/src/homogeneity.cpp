#include "transport/homogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace transport {

std::string claim_name(ClaimKind kind) {
    switch (kind) {
        case ClaimKind::MeasureRD: return "rd";
        case ClaimKind::MeasureRR: return "rr";
        case ClaimKind::MeasureOR: return "or";
        case ClaimKind::Distribution: return "distribution";
        case ClaimKind::CostIntroduce: return "cost-introduce";
        case ClaimKind::CostRemove: return "cost-remove";
    }
    return "?";
}

ClaimKind claim_from_name(const std::string& name) {
    if (name == "rd") return ClaimKind::MeasureRD;
    if (name == "rr") return ClaimKind::MeasureRR;
    if (name == "or") return ClaimKind::MeasureOR;
    if (name == "distribution") return ClaimKind::Distribution;
    if (name == "cost-introduce") return ClaimKind::CostIntroduce;
    if (name == "cost-remove") return ClaimKind::CostRemove;
    throw ParseError("unknown claim '" + name +
                     "' (expected rd|rr|or|distribution|cost-introduce|cost-remove)");
}

namespace {

// Conditionals of one counterfactual given the other; forward = Y^1 | Y^0
// gives (G, H), reverse gives the removing-treatment parameters.
std::pair<Rat, Rat> state_transition(const PotentialOutcomeTable& t,
                                     const PopulationId& p, const Stratum& v,
                                     bool forward) {
    Rat m00 = t.mass(p, v, 0, 0), m01 = t.mass(p, v, 0, 1);
    Rat m10 = t.mass(p, v, 1, 0), m11 = t.mass(p, v, 1, 1);
    Rat cases = forward ? m10 + m11 : m01 + m11;
    Rat noncases = forward ? m00 + m01 : m00 + m10;
    if (cases == Rat(0) || noncases == Rat(0))
        throw DegenerateBaseline(
            std::string("degenerate ") + (forward ? "Y^0" : "Y^1") +
            " distribution in population '" + p + "', stratum " + v.key());
    return {m11 / cases, m00 / noncases};
}

} // namespace

ClaimVerdict check_claim(const PotentialOutcomeTable& table,
                         const HomogeneityClaim& claim, double tol) {
    PotentialOutcomeTable t = table.marginalize(claim.conditioning);
    auto pops = t.populations();
    if (pops.size() < 2)
        throw EmptyCell("homogeneity check needs at least two populations");
    const PopulationId& ref = pops.front();

    // every population must cover every stratum
    std::set<Stratum> strata;
    for (const auto& p : pops)
        for (const auto& v : t.strata(p)) strata.insert(v);
    for (const auto& p : pops)
        for (const auto& v : strata)
            if (t.stratum_mass(p, v) == Rat(0))
                throw EmptyCell("population '" + p + "' has no mass in stratum " +
                                v.key());

    ClaimVerdict verdict;
    auto push = [&](const Stratum& v, const std::string& what, double a, double b) {
        double r = std::abs(a - b);
        verdict.residuals.push_back({v, what, a, b, r});
        verdict.max_residual = std::max(verdict.max_residual, r);
    };

    for (const auto& v : strata) {
        for (size_t pi = 1; pi < pops.size(); ++pi) {
            const PopulationId& p = pops[pi];
            switch (claim.kind) {
                case ClaimKind::MeasureRD:
                case ClaimKind::MeasureRR:
                case ClaimKind::MeasureOR: {
                    MeasureKind mk = claim.kind == ClaimKind::MeasureRD ? MeasureKind::RD
                                   : claim.kind == ClaimKind::MeasureRR ? MeasureKind::RR
                                                                        : MeasureKind::OR;
                    double a, b;
                    try {
                        a = effect_measure_value(mk, t.counterfactual_risk(ref, v, 1),
                                                 t.counterfactual_risk(ref, v, 0));
                        b = effect_measure_value(mk, t.counterfactual_risk(p, v, 1),
                                                 t.counterfactual_risk(p, v, 0));
                    } catch (const UndefinedMeasure& e) {
                        throw DegenerateBaseline("stratum " + v.key() + ": " + e.what());
                    }
                    push(v, measure_name(mk), a, b);
                    break;
                }
                case ClaimKind::Distribution:
                    for (int a = 0; a <= 1; ++a)
                        push(v, "Pr(Y^" + std::to_string(a) + "=1)",
                             t.counterfactual_risk(ref, v, a).to_double(),
                             t.counterfactual_risk(p, v, a).to_double());
                    break;
                case ClaimKind::CostIntroduce: {
                    auto [g1, h1] = state_transition(t, ref, v, true);
                    auto [g2, h2] = state_transition(t, p, v, true);
                    push(v, "G", g1.to_double(), g2.to_double());
                    push(v, "H", h1.to_double(), h2.to_double());
                    break;
                }
                case ClaimKind::CostRemove: {
                    auto [g1, h1] = state_transition(t, ref, v, false);
                    auto [g2, h2] = state_transition(t, p, v, false);
                    push(v, "Pr(Y^0=1|Y^1=1)", g1.to_double(), g2.to_double());
                    push(v, "Pr(Y^0=0|Y^1=0)", h1.to_double(), h2.to_double());
                    break;
                }
            }
        }
    }
    verdict.holds = verdict.max_residual <= tol;
    return verdict;
}

int JointDistribution::index(const std::string& name) const {
    for (int i = 0; i < variable_count(); ++i)
        if (names[i] == name) return i;
    throw UnknownNode("variable '" + name + "' not in joint distribution");
}

bool exact_conditional_independence(const JointDistribution& joint, int x, int y,
                                    const std::vector<int>& given) {
    int n = joint.variable_count();
    if (n > 20) throw TooLarge("joint distribution has more than 20 variables");
    if (x == y) throw UnknownNode("independence query with x == y");

    std::uint64_t zmask = 0;
    for (int g : given) {
        if (g == x || g == y)
            throw UnknownNode("conditioning set contains a query variable");
        zmask |= std::uint64_t(1) << g;
    }
    std::uint64_t xbit = std::uint64_t(1) << x, ybit = std::uint64_t(1) << y;

    // Accumulate N(x,y,z), then check N(x,y,z) * N(z) == N(x,z) * N(y,z)
    // for every z with positive mass; integers, so the test is exact.
    std::size_t total = std::size_t(1) << n;
    struct Counts {
        std::uint64_t xy[2][2] = {{0, 0}, {0, 0}};
    };
    std::map<std::uint64_t, Counts> by_z;
    for (std::size_t c = 0; c < total; ++c) {
        if (joint.mass[c] == 0) continue;
        Counts& k = by_z[c & zmask];
        k.xy[(c & xbit) ? 1 : 0][(c & ybit) ? 1 : 0] += joint.mass[c];
    }
    for (const auto& [z, k] : by_z) {
        std::uint64_t nz = k.xy[0][0] + k.xy[0][1] + k.xy[1][0] + k.xy[1][1];
        for (int xv = 0; xv <= 1; ++xv)
            for (int yv = 0; yv <= 1; ++yv) {
                std::uint64_t nx = k.xy[xv][0] + k.xy[xv][1];
                std::uint64_t ny = k.xy[0][yv] + k.xy[1][yv];
                using u128 = unsigned __int128;
                if (u128(k.xy[xv][yv]) * nz != u128(nx) * ny) return false;
            }
    }
    return true;
}

bool exact_conditional_independence(const JointDistribution& joint,
                                    const std::string& x, const std::string& y,
                                    const std::vector<std::string>& given) {
    std::vector<int> g;
    for (const auto& name : given) g.push_back(joint.index(name));
    return exact_conditional_independence(joint, joint.index(x), joint.index(y), g);
}

} // namespace transport
