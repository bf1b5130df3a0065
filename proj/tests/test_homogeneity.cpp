#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "transport/homogeneity.hpp"
#include "transport/logistic.hpp"
#include "transport/simgen.hpp"

using namespace transport;

namespace {

Stratum v(int level) { return Stratum({{"V", level}}); }

const std::vector<ClaimKind> kAllClaims = {
    ClaimKind::MeasureRD,   ClaimKind::MeasureRR,    ClaimKind::MeasureOR,
    ClaimKind::Distribution, ClaimKind::CostIntroduce, ClaimKind::CostRemove};

PotentialOutcomeTable mirrored_populations(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.enforce = ScenarioProperty::None;
    spec.strata = 2;
    spec.seed = seed;
    PotentialOutcomeTable base = make_table(spec);
    PotentialOutcomeTable t(base.covariates());
    for (const auto& [key, mass] : base.cells()) {
        const auto& [p, s, y0, y1] = key;
        if (p != kStudy) continue;
        t.add(kStudy, s, y0, y1, mass);
        t.add(kTarget, s, y0, y1, mass);
    }
    return t;
}

} // namespace

TEST_CASE("claim names round-trip") {
    for (ClaimKind k : kAllClaims) CHECK(claim_from_name(claim_name(k)) == k);
    CHECK_THROWS_AS(claim_from_name("hazard"), ParseError);
}

TEST_CASE("identical populations satisfy all six claims") {
    PotentialOutcomeTable t = mirrored_populations(1);
    for (ClaimKind k : kAllClaims) {
        ClaimVerdict verdict = check_claim(t, {k, {"V"}}, 0.0);
        CHECK(verdict.holds);
        CHECK(verdict.max_residual == 0.0);
        CHECK_FALSE(verdict.residuals.empty());
    }
}

TEST_CASE("S-ignorable tables satisfy every measure claim") {
    SplitMix64 rng(42);
    for (int trial = 0; trial < 60; ++trial) {
        ScenarioSpec spec;
        spec.enforce = ScenarioProperty::Distribution;
        spec.strata = 1 + static_cast<int>(rng.below(4));
        spec.seed = rng.next();
        PotentialOutcomeTable t = make_table(spec);
        for (ClaimKind k : kAllClaims)
            CHECK(check_claim(t, {k, {"V"}}, 1e-12).holds);
    }
}

TEST_CASE("equal RRs with different baselines: rr holds, distribution fails") {
    // baselines 0.1 vs 0.3, shared RR = 2, independent (Y0, Y1) coupling
    PotentialOutcomeTable t({"V"});
    auto fill = [&](const PopulationId& p, Rat r0, Rat r1) {
        t.add(p, v(0), 1, 1, r0 * r1);
        t.add(p, v(0), 1, 0, r0 * (Rat(1) - r1));
        t.add(p, v(0), 0, 1, (Rat(1) - r0) * r1);
        t.add(p, v(0), 0, 0, (Rat(1) - r0) * (Rat(1) - r1));
    };
    fill(kStudy, Rat(1, 10), Rat(2, 10));
    fill(kTarget, Rat(3, 10), Rat(6, 10));
    CHECK(check_claim(t, {ClaimKind::MeasureRR, {"V"}}, 1e-12).holds);
    ClaimVerdict dist = check_claim(t, {ClaimKind::Distribution, {"V"}}, 1e-12);
    CHECK_FALSE(dist.holds);
    CHECK(dist.max_residual == doctest::Approx(0.4)); // treated risks 0.2 vs 0.6
    CHECK_FALSE(check_claim(t, {ClaimKind::MeasureRD, {"V"}}, 1e-12).holds);
}

TEST_CASE("cost claims compare the conditional state transitions") {
    ScenarioSpec spec;
    spec.enforce = ScenarioProperty::Cost;
    spec.strata = 2;
    spec.baseline_gap = Rat(1, 5);
    spec.seed = 7;
    PotentialOutcomeTable t = make_table(spec);
    CHECK(check_claim(t, {ClaimKind::CostIntroduce, {"V"}}, 0.0).holds);
    CHECK_FALSE(check_claim(t, {ClaimKind::Distribution, {"V"}}, 1e-12).holds);
}

TEST_CASE("marginal independence does not give joint independence") {
    ScenarioSpec spec;
    spec.enforce = ScenarioProperty::MarginalNotJoint;
    spec.strata = 1;
    spec.seed = 21;
    PotentialOutcomeTable t = make_table(spec);
    CHECK(check_claim(t, {ClaimKind::Distribution, {"V"}}, 1e-12).holds);
    CHECK_FALSE(check_claim(t, {ClaimKind::CostIntroduce, {"V"}}, 1e-12).holds);
}

TEST_CASE("check_claim requires both populations on every stratum") {
    PotentialOutcomeTable t({"V"});
    t.add(kStudy, v(0), 0, 0, Rat(1));
    CHECK_THROWS_AS(check_claim(t, {ClaimKind::Distribution, {"V"}}, 0.0), EmptyCell);
    t.add(kTarget, v(1), 0, 0, Rat(1)); // disjoint strata
    CHECK_THROWS_AS(check_claim(t, {ClaimKind::Distribution, {"V"}}, 0.0), EmptyCell);
}

TEST_CASE("degenerate strata surface the stratum identity") {
    PotentialOutcomeTable t({"V"});
    for (const auto& p : {kStudy, kTarget}) {
        t.add(p, v(0), 0, 0, Rat(1, 2)); // baseline risk 0: RR undefined
        t.add(p, v(0), 0, 1, Rat(1, 2));
    }
    try {
        check_claim(t, {ClaimKind::MeasureRR, {"V"}}, 0.0);
        FAIL("expected DegenerateBaseline");
    } catch (const DegenerateBaseline& e) {
        CHECK(std::string(e.what()).find("V=0") != std::string::npos);
    }
}

TEST_CASE("exact conditional independence") {
    SUBCASE("product distribution is independent") {
        JointDistribution j;
        j.names = {"X", "Y"};
        j.den_exp = 4;
        j.mass = {9, 3, 3, 1}; // X ~ 1/4, Y ~ 1/4 independent
        CHECK(exact_conditional_independence(j, 0, 1, {}));
        CHECK(exact_conditional_independence(j, "X", "Y", {}));
    }
    SUBCASE("perfect correlation is dependent") {
        JointDistribution j;
        j.names = {"X", "Y"};
        j.den_exp = 1;
        j.mass = {1, 0, 0, 1};
        CHECK_FALSE(exact_conditional_independence(j, 0, 1, {}));
    }
    SUBCASE("conditioning can break dependence") {
        // Z -> X, Z -> Y: dependent marginally, independent given Z
        SplitMix64 rng(3);
        SelectionDiagram g = parse_diagram(
            "node Z\nnode X\nnode Y\nnode A\nnode P\n"
            "edge Z -> X\nedge Z -> Y\nedge A -> Y\nedge P -> Z\n"
            "treatment A\noutcome Y\nselection P\n");
        StructuralModelSpec model = random_model(g, rng, 3);
        JointDistribution j = enumerate_joint(model);
        CHECK(exact_conditional_independence(j, "X", "Y", {"Z", "P", "A"}));
    }
    SUBCASE("size guard") {
        JointDistribution j;
        j.names.assign(21, "");
        for (int i = 0; i < 21; ++i) j.names[i] = "N" + std::to_string(i);
        CHECK_THROWS_AS(exact_conditional_independence(j, 0, 1, {}), TooLarge);
    }
}

TEST_CASE("logistic fit recovers generating coefficients") {
    LogisticPopulationSpec gen;
    gen.b0 = -1.0;
    gen.b1 = 0.7;
    gen.b2 = 0.4;
    gen.b4 = {0.9};
    gen.cov_prev_study = {0.3};
    gen.cov_prev_target = {0.6};
    LogisticData data = sample_logistic_records(gen, 100000, 2024);
    LogisticFit fit = fit_logistic(data);
    REQUIRE(fit.converged);
    auto within4se = [&](const std::string& name, double truth) {
        double se = std::sqrt(fit.variance(name));
        CHECK(std::abs(fit.coefficient(name) - truth) < 4 * se);
    };
    within4se("intercept", gen.b0);
    within4se("a", gen.b1);
    within4se("p", gen.b2);
    within4se("V1", gen.b4[0]);
}

TEST_CASE("null treatment effect estimates near zero") {
    LogisticPopulationSpec gen;
    gen.b0 = -0.5;
    gen.b1 = 0.0;
    gen.b2 = 0.3;
    LogisticData data = sample_logistic_records(gen, 100000, 515);
    LogisticFit fit = fit_logistic(data);
    REQUIRE(fit.converged);
    CHECK(std::abs(fit.coefficient("a")) < 4 * std::sqrt(fit.variance("a")));
}

TEST_CASE("separation and rank deficiency are typed errors") {
    LogisticData sep;
    sep.columns = {"a", "p"};
    for (int i = 0; i < 20; ++i) {
        // y == a exactly; p varies so the design stays full rank
        sep.rows.push_back({i % 2, {double(i % 2), double(i >= 10)}, 1.0});
    }
    CHECK_THROWS_AS(fit_logistic(sep), SeparationDetected);

    LogisticData dup;
    dup.columns = {"a", "p"};
    SplitMix64 rng(9);
    for (int i = 0; i < 40; ++i) {
        double a = static_cast<double>(rng.below(2));
        dup.rows.push_back({static_cast<int>(rng.below(2)), {a, a}, 1.0});
    }
    CHECK_THROWS_AS(fit_logistic(dup), RankDeficient);
}

TEST_CASE("wald test basics") {
    LogisticPopulationSpec gen;
    gen.b0 = -0.3;
    gen.b1 = 0.4;
    gen.b2 = 0.0;
    LogisticData data = exact_population_records(gen);
    LogisticFit fit = fit_logistic(data);
    REQUIRE(fit.converged);
    WaldResult w = beta2_misspecification_test(fit, 0.05);
    CHECK(w.statistic == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(w.p_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_FALSE(w.reject);
    CHECK(w.dof == 1);

    LogisticFit bad = fit;
    bad.converged = false;
    CHECK_THROWS_AS(beta2_misspecification_test(bad, 0.05), NotConverged);
}

TEST_CASE("chi-square(1) upper tail reference values") {
    CHECK(chi_square1_sf(0.0) == doctest::Approx(1.0));
    CHECK(chi_square1_sf(1.0) == doctest::Approx(0.3173105078629141).epsilon(1e-9));
    CHECK(chi_square1_sf(3.841458820694124) == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(chi_square1_sf(6.634896601021213) == doctest::Approx(0.01).epsilon(1e-9));
    CHECK(chi_square1_sf(100.0) < 2e-23);
}

TEST_CASE("score vanishes at the optimum and information matches FD Hessian") {
    LogisticPopulationSpec gen;
    gen.b0 = -0.8;
    gen.b1 = 0.5;
    gen.b2 = 0.2;
    gen.b4 = {0.6};
    gen.cov_prev_study = {0.4};
    gen.cov_prev_target = {0.5};
    LogisticData data = sample_logistic_records(gen, 2000, 77);
    LogisticFit fit = fit_logistic(data);
    REQUIRE(fit.converged);

    auto grad = score(data, fit.coefficients);
    for (double g : grad) CHECK(std::abs(g) <= 1e-8);

    auto info = fisher_information(data, fit.coefficients);
    const double h = 1e-5;
    size_t k = fit.coefficients.size();
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            auto bp = fit.coefficients, bm = fit.coefficients;
            bp[j] += h;
            bm[j] -= h;
            double fd = -(score(data, bp)[i] - score(data, bm)[i]) / (2 * h);
            CHECK(info[i][j] == doctest::Approx(fd).epsilon(1e-4));
        }
}

TEST_CASE("record CSV and the interaction column") {
    std::istringstream in(
        "y,a,p,V1,weight\n"
        "1,1,0,1,2.5\n"
        "0,0,1,0,1.0\n");
    LogisticData data = read_records_csv(in);
    REQUIRE(data.columns == std::vector<std::string>{"a", "p", "V1"});
    REQUIRE(data.rows.size() == 2);
    CHECK(data.rows[0].weight == 2.5);
    CHECK(data.rows[0].y == 1);

    LogisticData enriched = with_interaction(data);
    CHECK(enriched.columns.back() == "a_x_p");
    CHECK(enriched.rows[0].x.back() == 0.0); // a=1, p=0
    CHECK(enriched.rows[1].x.back() == 0.0);
}
