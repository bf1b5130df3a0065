#include "transport/simgen.hpp"

#include "transport/homogeneity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

namespace transport {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) throw std::domain_error("below(0)");
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = next();
    } while (v >= limit);
    return v % bound;
}

long long SplitMix64::range(long long lo, long long hi) {
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
}

bool SplitMix64::bernoulli(const Rat& p) {
    if (p.num() <= 0) return false;
    if (p >= Rat(1)) return true;
    return below(static_cast<std::uint64_t>(p.den())) <
           static_cast<std::uint64_t>(p.num());
}

namespace {

// Uniform 62-bit fraction u with u/2^62 compared against a rational
// threshold; keeps the sampling path free of floating point.
bool below_threshold(std::uint64_t u62, const Rat& threshold) {
    using i128 = __int128;
    return i128(u62) * threshold.den() < (i128(threshold.num()) << 62);
}

Stratum stratum_of(int level) {
    return Stratum({{"V", level}});
}

// interior rational k/den with k in [den/8, 7*den/8]
Rat interior(SplitMix64& rng, long long den = 64) {
    return Rat(rng.range(den / 8, den - den / 8), den);
}

void add_joint(PotentialOutcomeTable& t, const PopulationId& p, const Stratum& v,
               const Rat& prevalence, const Rat& p11, const Rat& p10,
               const Rat& p01, const Rat& p00) {
    t.add(p, v, 1, 1, prevalence * p11);
    t.add(p, v, 1, 0, prevalence * p10);
    t.add(p, v, 0, 1, prevalence * p01);
    t.add(p, v, 0, 0, prevalence * p00);
}

// joint cells from baseline risk and COST parameters
struct JointCells {
    Rat p11, p10, p01, p00;
};

JointCells cells_from_cost(const Rat& p0, const Rat& g, const Rat& h) {
    return {g * p0, (Rat(1) - g) * p0, (Rat(1) - h) * (Rat(1) - p0),
            h * (Rat(1) - p0)};
}

JointCells independent_coupling(const Rat& r0, const Rat& r1) {
    return {r0 * r1, r0 * (Rat(1) - r1), (Rat(1) - r0) * r1,
            (Rat(1) - r0) * (Rat(1) - r1)};
}

std::vector<Rat> random_prevalences(SplitMix64& rng, int k) {
    std::vector<Rat> out;
    long long total = 0;
    std::vector<long long> w(k);
    for (auto& x : w) {
        x = rng.range(1, 8);
        total += x;
    }
    for (long long x : w) out.emplace_back(x, total);
    return out;
}

void self_verify(const PotentialOutcomeTable& table,
                 const std::vector<ClaimKind>& must_hold,
                 const std::vector<ClaimKind>& must_fail, const Rat& violation) {
    for (ClaimKind kind : must_hold) {
        auto verdict = check_claim(table, {kind, {"V"}}, 0.0);
        if (!verdict.holds)
            throw InfeasibleScenario("constructed table violates enforced claim '" +
                                     claim_name(kind) + "' (residual " +
                                     std::to_string(verdict.max_residual) + ")");
    }
    for (ClaimKind kind : must_fail) {
        auto verdict = check_claim(table, {kind, {"V"}}, 0.0);
        double needed = violation.to_double();
        if (verdict.max_residual < std::max(needed, 1e-15))
            throw InfeasibleScenario("constructed table does not violate claim '" +
                                     claim_name(kind) + "' by the requested margin");
    }
}

} // namespace

ScenarioSpec parse_scenario(const std::string& text) {
    ScenarioSpec spec;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
            if (blank) continue;
            throw ParseError("scenario line " + std::to_string(lineno) +
                             ": expected 'key = value'");
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "enforce") {
                if (value == "none") spec.enforce = ScenarioProperty::None;
                else if (value == "distribution") spec.enforce = ScenarioProperty::Distribution;
                else if (value == "rd") spec.enforce = ScenarioProperty::MeasureRD;
                else if (value == "rr") spec.enforce = ScenarioProperty::MeasureRR;
                else if (value == "or") spec.enforce = ScenarioProperty::MeasureOR;
                else if (value == "cost") spec.enforce = ScenarioProperty::Cost;
                else if (value == "marginal-not-joint")
                    spec.enforce = ScenarioProperty::MarginalNotJoint;
                else throw ParseError("unknown enforce value '" + value + "'");
            } else if (key == "strata") {
                spec.strata = std::stoi(value);
                if (spec.strata < 1 || spec.strata > 64)
                    throw ParseError("strata must be in [1, 64]");
            } else if (key == "baseline_gap") {
                spec.baseline_gap = Rat::parse(value);
            } else if (key == "violation") {
                spec.violation = Rat::parse(value);
            } else if (key == "monotone") {
                if (value == "none") spec.monotone = MonotoneScenario::Free;
                else if (value == "increasing") spec.monotone = MonotoneScenario::Increasing;
                else if (value == "decreasing") spec.monotone = MonotoneScenario::Decreasing;
                else throw ParseError("unknown monotone value '" + value + "'");
            } else if (key == "seed") {
                spec.seed = std::stoull(value);
            } else {
                throw ParseError("unknown scenario key '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw ParseError("scenario line " + std::to_string(lineno) +
                             ": bad value for '" + key + "'");
        }
    }
    return spec;
}

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

PotentialOutcomeTable make_table(const ScenarioSpec& spec) {
    SplitMix64 rng(spec.seed);
    PotentialOutcomeTable table({"V"});
    auto prev_s = random_prevalences(rng, spec.strata);
    auto prev_t = random_prevalences(rng, spec.strata);

    const Rat gap = spec.baseline_gap;
    if (gap < Rat(0) || gap >= Rat(1))
        throw InfeasibleScenario("baseline_gap must lie in [0, 1)");

    std::vector<ClaimKind> hold, fail;
    const bool want_violation = spec.violation > Rat(0) || gap > Rat(0);

    for (int i = 0; i < spec.strata; ++i) {
        Stratum v = stratum_of(i);
        switch (spec.enforce) {
            case ScenarioProperty::Distribution: {
                // shared stratum joint: every conditional claim holds
                long long c11 = rng.range(1, 16), c10 = rng.range(1, 16);
                long long c01 = rng.range(1, 16), c00 = rng.range(1, 16);
                long long total = c11 + c10 + c01 + c00;
                JointCells q{Rat(c11, total), Rat(c10, total), Rat(c01, total),
                             Rat(c00, total)};
                add_joint(table, kStudy, v, prev_s[i], q.p11, q.p10, q.p01, q.p00);
                add_joint(table, kTarget, v, prev_t[i], q.p11, q.p10, q.p01, q.p00);
                break;
            }
            case ScenarioProperty::MeasureRD:
            case ScenarioProperty::MeasureRR:
            case ScenarioProperty::MeasureOR: {
                Rat r0s, r0t;
                int tries = 0;
                do {
                    r0s = interior(rng);
                    r0t = interior(rng);
                    if (++tries > 10000)
                        throw InfeasibleScenario(
                            "cannot separate baselines by the requested violation");
                } while ((r0s - r0t).abs() < spec.violation ||
                         (want_violation && r0s == r0t));
                Rat r1s, r1t;
                if (spec.enforce == ScenarioProperty::MeasureRD) {
                    long long lo = 1 - std::min(r0s, r0t).num() * 64 /
                                           std::min(r0s, r0t).den();
                    long long hi = 63 - std::max(r0s, r0t).num() * 64 /
                                            std::max(r0s, r0t).den();
                    Rat d(rng.range(lo, hi), 64);
                    r1s = r0s + d;
                    r1t = r0t + d;
                } else if (spec.enforce == ScenarioProperty::MeasureRR) {
                    Rat ratio;
                    do {
                        ratio = Rat(rng.range(1, 4), rng.range(1, 4));
                    } while (ratio * std::max(r0s, r0t) >= Rat(1));
                    r1s = ratio * r0s;
                    r1t = ratio * r0t;
                } else {
                    Rat orv(rng.range(1, 8), rng.range(1, 8));
                    auto apply = [&](const Rat& r0) {
                        Rat odds = r0 / (Rat(1) - r0) * orv;
                        return odds / (Rat(1) + odds);
                    };
                    r1s = apply(r0s);
                    r1t = apply(r0t);
                }
                auto qs = independent_coupling(r0s, r1s);
                auto qt = independent_coupling(r0t, r1t);
                add_joint(table, kStudy, v, prev_s[i], qs.p11, qs.p10, qs.p01, qs.p00);
                add_joint(table, kTarget, v, prev_t[i], qt.p11, qt.p10, qt.p01, qt.p00);
                break;
            }
            case ScenarioProperty::Cost: {
                Rat g = spec.monotone == MonotoneScenario::Increasing
                            ? Rat(1)
                            : interior(rng);
                Rat h = spec.monotone == MonotoneScenario::Decreasing
                            ? Rat(1)
                            : interior(rng);
                Rat p0s = interior(rng);
                Rat p0t;
                int tries = 0;
                for (;;) {
                    bool up = rng.bernoulli(Rat(1, 2));
                    p0t = up ? p0s + gap : p0s - gap;
                    if (p0t > Rat(0) && p0t < Rat(1)) break;
                    p0t = up ? p0s - gap : p0s + gap;
                    if (p0t > Rat(0) && p0t < Rat(1)) break;
                    p0s = interior(rng);
                    if (++tries > 10000)
                        throw InfeasibleScenario(
                            "baseline_gap leaves no feasible target baseline");
                }
                auto qs = cells_from_cost(p0s, g, h);
                auto qt = cells_from_cost(p0t, g, h);
                add_joint(table, kStudy, v, prev_s[i], qs.p11, qs.p10, qs.p01, qs.p00);
                add_joint(table, kTarget, v, prev_t[i], qt.p11, qt.p10, qt.p01, qt.p00);
                break;
            }
            case ScenarioProperty::MarginalNotJoint: {
                Rat m0, m1, lo, hi;
                int tries = 0;
                do {
                    m0 = interior(rng, 32);
                    m1 = interior(rng, 32);
                    lo = std::max(Rat(0), m0 + m1 - Rat(1));
                    hi = std::min(m0, m1);
                    if (++tries > 10000)
                        throw InfeasibleScenario(
                            "cannot realize the requested joint-independence violation");
                } while ((hi - lo) * Rat(1, 2) * (Rat(1) / m0) <
                         std::max(spec.violation, Rat(1, 64)));
                Rat q11s = lo + (hi - lo) * Rat(1, 4);
                Rat q11t = lo + (hi - lo) * Rat(3, 4);
                auto cells = [&](const Rat& q11) {
                    return JointCells{q11, m0 - q11, m1 - q11,
                                      Rat(1) - m0 - m1 + q11};
                };
                auto qs = cells(q11s), qt = cells(q11t);
                add_joint(table, kStudy, v, prev_s[i], qs.p11, qs.p10, qs.p01, qs.p00);
                add_joint(table, kTarget, v, prev_t[i], qt.p11, qt.p10, qt.p01, qt.p00);
                break;
            }
            case ScenarioProperty::None: {
                for (const auto& [pop, prev] :
                     {std::pair{kStudy, prev_s[i]}, std::pair{kTarget, prev_t[i]}}) {
                    long long c11 = rng.range(1, 16), c10 = rng.range(1, 16);
                    long long c01 = rng.range(1, 16), c00 = rng.range(1, 16);
                    long long total = c11 + c10 + c01 + c00;
                    add_joint(table, pop, v, prev, Rat(c11, total), Rat(c10, total),
                              Rat(c01, total), Rat(c00, total));
                }
                break;
            }
        }
    }

    switch (spec.enforce) {
        case ScenarioProperty::Distribution:
            hold = {ClaimKind::Distribution, ClaimKind::MeasureRD,
                    ClaimKind::MeasureRR, ClaimKind::MeasureOR,
                    ClaimKind::CostIntroduce, ClaimKind::CostRemove};
            break;
        case ScenarioProperty::MeasureRD:
            hold = {ClaimKind::MeasureRD};
            if (want_violation) fail = {ClaimKind::Distribution};
            break;
        case ScenarioProperty::MeasureRR:
            hold = {ClaimKind::MeasureRR};
            if (want_violation) fail = {ClaimKind::Distribution};
            break;
        case ScenarioProperty::MeasureOR:
            hold = {ClaimKind::MeasureOR};
            if (want_violation) fail = {ClaimKind::Distribution};
            break;
        case ScenarioProperty::Cost:
            hold = {ClaimKind::CostIntroduce};
            if (gap > Rat(0)) fail = {ClaimKind::Distribution};
            break;
        case ScenarioProperty::MarginalNotJoint:
            hold = {ClaimKind::Distribution};
            fail = {ClaimKind::CostIntroduce};
            break;
        case ScenarioProperty::None:
            break;
    }
    self_verify(table, hold, fail, spec.violation);
    return table;
}

TrialSample sample_trial(const PotentialOutcomeTable& table,
                         long long n_per_population, const Rat& assignment_prob,
                         std::uint64_t seed) {
    if (n_per_population <= 0) throw ParseError("n_per_population must be positive");
    if (assignment_prob <= Rat(0) || assignment_prob > Rat(1))
        throw ParseError("assignment probability must lie in (0, 1]");
    SplitMix64 rng(seed);
    TrialSample out;
    out.counts = StratifiedCounts(table.covariates());

    for (const auto& pop : table.populations()) {
        // cells in deterministic (map) order with exact cumulative masses
        std::vector<std::tuple<Stratum, int, int, Rat>> cells;
        for (const auto& [k, m] : table.cells())
            if (std::get<0>(k) == pop && m > Rat(0))
                cells.emplace_back(std::get<1>(k), std::get<2>(k), std::get<3>(k), m);
        Rat total = table.population_mass(pop);

        for (long long i = 0; i < n_per_population; ++i) {
            std::uint64_t u = rng.next() >> 2; // 62-bit fraction
            Rat cum(0);
            size_t pick = cells.size() - 1;
            for (size_t c = 0; c < cells.size(); ++c) {
                cum += std::get<3>(cells[c]) / total;
                if (below_threshold(u, cum)) {
                    pick = c;
                    break;
                }
            }
            const auto& [v, y0, y1, m] = cells[pick];
            int a = rng.bernoulli(assignment_prob) ? 1 : 0;
            TrialRecord rec{pop, v, a, a == 1 ? y1 : y0, y0, y1};
            out.counts.add(pop, v, rec.a, rec.y, 1);
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

LogisticData logistic_data_from_records(const std::vector<TrialRecord>& records,
                                        const std::vector<std::string>& covariates) {
    LogisticData data;
    data.columns = {"a", "p"};
    for (const auto& c : covariates) data.columns.push_back(c);
    for (const auto& rec : records) {
        WeightedRecord row;
        row.y = rec.y;
        row.x.push_back(rec.a);
        row.x.push_back(rec.population == kTarget ? 1.0 : 0.0);
        for (const auto& c : covariates) row.x.push_back(rec.stratum.level(c));
        data.rows.push_back(std::move(row));
    }
    return data;
}

JointDistribution enumerate_joint(const StructuralModelSpec& model) {
    const SelectionDiagram& g = model.diagram;
    int n = g.node_count();
    if (n > 20) throw TooLarge("structural model has more than 20 binary nodes");
    if (static_cast<int>(model.cpts.size()) != n)
        throw ParseError("model needs one CPT per node");

    // per-node power-of-two denominators; scale to a common 2^e_i
    std::vector<int> exp(n, 0);
    int total_exp = 0;
    for (int i = 0; i < n; ++i) {
        size_t rows = size_t(1) << g.parents(i).size();
        if (model.cpts[i].size() != rows)
            throw ParseError("CPT for node '" + g.name(i) + "' must have " +
                             std::to_string(rows) + " rows");
        for (const Rat& p : model.cpts[i]) {
            if (p < Rat(0) || p > Rat(1))
                throw ParseError("CPT entries must be probabilities");
            auto d = static_cast<std::uint64_t>(p.den());
            if (!std::has_single_bit(d))
                throw ParseError("CPT denominators must be powers of two");
            exp[i] = std::max(exp[i], std::countr_zero(d));
        }
        total_exp += exp[i];
    }
    if (total_exp > 62)
        throw TooLarge("joint denominator exceeds 2^62; use coarser CPTs");

    JointDistribution joint;
    joint.names = g.names();
    joint.den_exp = total_exp;
    size_t configs = size_t(1) << n;
    joint.mass.assign(configs, 0);
    for (size_t c = 0; c < configs; ++c) {
        std::uint64_t num = 1;
        for (int i = 0; i < n && num != 0; ++i) {
            std::uint64_t row = 0;
            const auto& pars = g.parents(i);
            for (size_t b = 0; b < pars.size(); ++b)
                if (c & (size_t(1) << pars[b])) row |= std::uint64_t(1) << b;
            const Rat& p1 = model.cpts[i][row];
            std::uint64_t scaled =
                static_cast<std::uint64_t>(p1.num())
                << (exp[i] - std::countr_zero(static_cast<std::uint64_t>(p1.den())));
            std::uint64_t factor =
                (c & (size_t(1) << i)) ? scaled : (std::uint64_t(1) << exp[i]) - scaled;
            num *= factor;
        }
        joint.mass[c] = num;
    }
    return joint;
}

SelectionDiagram random_diagram(int n_nodes, const Rat& edge_prob, SplitMix64& rng) {
    if (n_nodes < 3) throw ParseError("random diagram needs at least 3 nodes");
    std::vector<std::string> names;
    for (int i = 0; i < n_nodes; ++i) names.push_back("X" + std::to_string(i));
    std::vector<std::pair<int, int>> edges;
    // edges only go i -> j with i < j, so X0 stays a root
    for (int i = 0; i < n_nodes; ++i)
        for (int j = i + 1; j < n_nodes; ++j)
            if (rng.bernoulli(edge_prob)) edges.emplace_back(i, j);
    int a = static_cast<int>(rng.range(1, n_nodes - 1));
    int y;
    do {
        y = static_cast<int>(rng.range(1, n_nodes - 1));
    } while (y == a);
    return SelectionDiagram(names, edges, a, y, 0,
                            std::vector<bool>(n_nodes, false));
}

StructuralModelSpec random_model(const SelectionDiagram& g, SplitMix64& rng,
                                 int den_exp) {
    StructuralModelSpec model{g, {}};
    long long den = 1LL << den_exp;
    for (int i = 0; i < g.node_count(); ++i) {
        size_t rows = size_t(1) << g.parents(i).size();
        std::vector<Rat> cpt;
        for (size_t r = 0; r < rows; ++r) cpt.emplace_back(rng.range(1, den - 1), den);
        model.cpts.push_back(std::move(cpt));
    }
    return model;
}

TargetQuantities true_target_quantities(const PotentialOutcomeTable& table,
                                        const PopulationId& target) {
    TargetQuantities q;
    q.risk1 = table.marginal_counterfactual_risk(target, 1);
    q.risk0 = table.marginal_counterfactual_risk(target, 0);
    for (MeasureKind kind : {MeasureKind::RD, MeasureKind::RR, MeasureKind::OR}) {
        try {
            q.measures.push_back({kind, effect_measure_value(kind, q.risk1, q.risk0)});
        } catch (const UndefinedMeasure&) {
        }
    }
    q.pooled_cost = cost_from_joint(table.pooled(), target, Stratum());
    for (const auto& v : table.strata(target)) {
        q.stratum_cost[v] = cost_from_joint(table, target, v);
        q.stratum_risk1[v] = table.counterfactual_risk(target, v, 1);
        q.stratum_risk0[v] = table.counterfactual_risk(target, v, 0);
    }
    return q;
}

namespace {

double expit(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

bool bernoulli_double(SplitMix64& rng, double p) {
    // 53-bit fixed-point threshold; deterministic across platforms
    const double scale = 9007199254740992.0; // 2^53
    auto threshold = static_cast<std::uint64_t>(std::llround(p * scale));
    return (rng.next() >> 11) < threshold;
}

} // namespace

LogisticData exact_population_records(const LogisticPopulationSpec& spec) {
    size_t j = spec.b4.size();
    if (spec.cov_prev_study.size() != j || spec.cov_prev_target.size() != j)
        throw ParseError("covariate prevalence vectors must match b4 length");
    LogisticData data;
    data.columns = {"a", "p"};
    for (size_t k = 0; k < j; ++k) data.columns.push_back("V" + std::to_string(k + 1));

    int u_states = spec.has_unmeasured ? 2 : 1;
    for (int p = 0; p <= 1; ++p) {
        double wp = p == 1 ? spec.target_share : 1.0 - spec.target_share;
        const auto& prev = p == 1 ? spec.cov_prev_target : spec.cov_prev_study;
        double u_prev = p == 1 ? spec.u_prev_target : spec.u_prev_study;
        for (int a = 0; a <= 1; ++a) {
            double wa = a == 1 ? spec.assign_prob : 1.0 - spec.assign_prob;
            for (std::uint32_t vbits = 0; vbits < (1u << j); ++vbits) {
                double wv = 1.0, eta = spec.b0 + spec.b1 * a + spec.b2 * p;
                std::vector<double> x{double(a), double(p)};
                for (size_t k = 0; k < j; ++k) {
                    int vk = (vbits >> k) & 1;
                    wv *= vk ? prev[k] : 1.0 - prev[k];
                    eta += spec.b4[k] * vk;
                    x.push_back(vk);
                }
                for (int u = 0; u < u_states; ++u) {
                    double wu = spec.has_unmeasured
                                    ? (u ? u_prev : 1.0 - u_prev)
                                    : 1.0;
                    double mu = expit(eta + spec.bu * u);
                    double w = wp * wa * wv * wu;
                    if (w == 0.0) continue;
                    data.rows.push_back({1, x, w * mu});
                    data.rows.push_back({0, x, w * (1.0 - mu)});
                }
            }
        }
    }
    return data;
}

LogisticData sample_logistic_records(const LogisticPopulationSpec& spec,
                                     long long n, std::uint64_t seed) {
    size_t j = spec.b4.size();
    if (spec.cov_prev_study.size() != j || spec.cov_prev_target.size() != j)
        throw ParseError("covariate prevalence vectors must match b4 length");
    SplitMix64 rng(seed);
    LogisticData data;
    data.columns = {"a", "p"};
    for (size_t k = 0; k < j; ++k) data.columns.push_back("V" + std::to_string(k + 1));
    for (long long i = 0; i < n; ++i) {
        int p = bernoulli_double(rng, spec.target_share) ? 1 : 0;
        const auto& prev = p == 1 ? spec.cov_prev_target : spec.cov_prev_study;
        double eta = spec.b0 + spec.b2 * p;
        std::vector<double> x;
        int a = bernoulli_double(rng, spec.assign_prob) ? 1 : 0;
        eta += spec.b1 * a;
        x.push_back(a);
        x.push_back(p);
        for (size_t k = 0; k < j; ++k) {
            int vk = bernoulli_double(rng, prev[k]) ? 1 : 0;
            eta += spec.b4[k] * vk;
            x.push_back(vk);
        }
        if (spec.has_unmeasured) {
            double u_prev = p == 1 ? spec.u_prev_target : spec.u_prev_study;
            if (bernoulli_double(rng, u_prev)) eta += spec.bu;
        }
        int y = bernoulli_double(rng, expit(eta)) ? 1 : 0;
        data.rows.push_back({y, std::move(x), 1.0});
    }
    return data;
}

} // namespace transport
