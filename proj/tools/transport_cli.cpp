#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "transport/core.hpp"
#include "transport/cost.hpp"
#include "transport/diagram.hpp"
#include "transport/homogeneity.hpp"
#include "transport/logistic.hpp"
#include "transport/report.hpp"
#include "transport/simgen.hpp"
#include "transport/standardization.hpp"
#include "transport/table.hpp"

using nlohmann::json;
using namespace transport;

namespace {

struct Output {
    std::string json_path; // empty = no JSON, "-" = stdout
    bool wrote_failure = false;
};

void emit(const json& report, const Output& out) {
    validate_report(report);
    if (out.json_path.empty()) return;
    std::string text = report_to_string(report);
    if (out.json_path == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out.json_path, std::ios::binary);
        if (!f) throw ParseError("cannot write '" + out.json_path + "'");
        f << text;
    }
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

json measures_json(const std::vector<EffectMeasure>& measures) {
    json out = json::object();
    for (const auto& m : measures) out[measure_name(m.kind)] = m.value;
    return out;
}

json weights_json(const StandardizationWeights& weights) {
    json out = json::object();
    for (const auto& [v, w] : weights.w) out[v.key()] = w.to_double();
    return out;
}

json estimate_json(const TransportEstimate& est,
                   const StandardizationWeights* weights) {
    json e;
    e["approach"] = est.approach;
    e["assumptions"] = est.assumptions;
    if (est.target_risk1) e["target_risk1"] = *est.target_risk1;
    if (est.target_risk0) e["target_risk0"] = *est.target_risk0;
    e["measures"] = measures_json(est.measures);
    if (weights) e["weights"] = weights_json(*weights);
    return e;
}

void warn_small_cells(const StratifiedCounts& counts, json& report) {
    for (const auto& [k, n] : counts.cells()) {
        if (n > 0 && n < 5) {
            report["warnings"].push_back(
                "small cell counts (< 5) present; estimates may be unstable");
            return;
        }
    }
}

int run_dsep(const std::string& diagram_path, const std::string& x,
             const std::string& y, const std::string& given_csv,
             const Output& out) {
    SelectionDiagram g = parse_diagram_file(diagram_path);
    json report = make_report("dsep", {{"diagram", diagram_path}});
    int status = 0;
    if (!x.empty() || !y.empty()) {
        DSepQuery q;
        q.x = x.empty() ? g.name(g.outcome()) : x;
        q.y = y.empty() ? g.name(g.selection()) : y;
        for (const auto& z : split_list(given_csv)) q.given.insert(z);
        bool sep = d_separated(g, q);
        report["dsep"] = {{"x", q.x},
                          {"y", q.y},
                          {"given", q.given},
                          {"separated", sep}};
        std::cout << q.x << (sep ? " _||_ " : " ~_||_ ") << q.y << " | {"
                  << given_csv << "}\n";
    } else {
        TransportabilityVerdict v = transportability(g);
        report["verdict"] = {{"transportable", v.transportable},
                             {"witness_set", v.witness_set},
                             {"reason", v.reason}};
        if (v.transportable) {
            std::cout << "transportable; witness set {";
            bool first = true;
            for (const auto& n : v.witness_set)
                std::cout << (first ? "" : ", ") << n, first = false;
            std::cout << "}\n";
        } else {
            std::cout << "not transportable: " << v.reason << "\n";
            status = 3;
        }
    }
    emit(report, out);
    return status;
}

int run_adjust_sets(const std::string& diagram_path, const std::string& candidates_csv,
                    int max_size, const Output& out) {
    SelectionDiagram g = parse_diagram_file(diagram_path);
    std::set<std::string> candidates;
    if (candidates_csv.empty())
        candidates = baseline_candidates(g);
    else
        for (const auto& c : split_list(candidates_csv)) candidates.insert(c);
    auto sets = sufficient_adjustment_sets(g, candidates, max_size);
    auto reduction = check_baseline_reduction(g);

    json report = make_report("adjust-sets", {{"diagram", diagram_path},
                                              {"max_size", max_size}});
    report["adjustment_sets"] = json::array();
    for (const auto& s : sets) report["adjustment_sets"].push_back(s);
    report["baseline_reduction"] = {{"ok", reduction.ok},
                                    {"reason", reduction.reason}};
    for (const auto& s : sets) {
        std::cout << "{";
        bool first = true;
        for (const auto& n : s) std::cout << (first ? "" : ", ") << n, first = false;
        std::cout << "}\n";
    }
    emit(report, out);
    if (sets.empty())
        throw AdjustmentNotFound("no sufficient adjustment set of size <= " +
                                 std::to_string(max_size) + ": " + reduction.reason);
    return 0;
}

int run_standardize(const std::string& counts_path, const std::string& approach,
                    const std::string& measure, const std::string& v_set_csv,
                    const PopulationId& target, const PopulationId& source,
                    const Output& out) {
    StratifiedCounts counts = read_counts_file(counts_path);
    std::vector<std::string> v_set =
        v_set_csv.empty() ? counts.covariates() : split_list(v_set_csv);
    StratifiedCounts c = counts.marginalize(v_set);

    json report = make_report("standardize", {{"counts", counts_path},
                                              {"approach", approach},
                                              {"measure", measure},
                                              {"target", target},
                                              {"source", source}});
    warn_small_cells(c, report);

    if (approach == "1") {
        MeasureKind kind = measure_from_name(measure);
        auto weights = compute_weights(c, weight_kind_for(kind), target);
        auto effects = stratum_effects(c, source, kind);
        EffectMeasure result = standardize_measure(effects, weights, kind);
        json e;
        e["approach"] = "1";
        e["assumptions"] = "conditional effect homogeneity on the " +
                           measure_name(kind) + " scale; collapsible measure";
        e["measures"] = json{{measure_name(kind), result.value}};
        e["weights"] = weights_json(weights);
        json per = json::array();
        for (const auto& ef : effects)
            per.push_back({{"stratum", ef.stratum.key()},
                           {measure_name(kind), ef.measure.value}});
        e["per_stratum"] = per;
        report["estimate"] = e;
        std::cout << "approach 1: target " << measure_name(kind) << " = "
                  << result.value << "\n";
    } else if (approach == "2") {
        MeasureKind kind = measure_from_name(measure);
        auto weights = compute_weights(c, WeightKind::Prevalence, target);
        auto effects = stratum_effects(c, source, kind);
        auto baselines = target_baselines(c, target);
        TransportEstimate est = standardize_predicted_risk(baselines, effects, weights);
        report["estimate"] = estimate_json(est, &weights);
        for (const auto& w : est.warnings) report["warnings"].push_back(w);
        std::cout << "approach 2: predicted target risk under treatment = "
                  << *est.target_risk1 << "\n";
    } else if (approach == "3" || approach == "ipw") {
        TransportEstimate est = approach == "3"
                                    ? standardize_distribution(counts, v_set, target, source)
                                    : ipw_estimate(counts, v_set, target, source);
        report["estimate"] = estimate_json(est, nullptr);
        for (const auto& w : est.warnings) report["warnings"].push_back(w);
        std::cout << "approach " << approach << ": target risks " << *est.target_risk1
                  << " (treated), " << *est.target_risk0 << " (untreated)\n";
    } else {
        throw ParseError("unknown approach '" + approach + "'");
    }
    emit(report, out);
    return 0;
}

int run_cost(const std::string& joint_path, const std::string& counts_path,
             const std::string& monotone, const std::string& v_set_csv,
             const PopulationId& target, const PopulationId& source,
             const Output& out) {
    json report = make_report("cost", {{"target", target}, {"source", source}});
    std::map<Stratum, CostParams> params;
    std::map<Stratum, Rat> baselines;
    StandardizationWeights weights;
    json per = json::array();
    json standardized;

    if (!joint_path.empty()) {
        report["inputs"]["joint"] = joint_path;
        PotentialOutcomeTable table = read_table_file(joint_path);
        std::vector<std::string> v_set =
            v_set_csv.empty() ? table.covariates() : split_list(v_set_csv);
        PotentialOutcomeTable t = table.marginalize(v_set);
        for (const auto& v : t.strata(source)) {
            params[v] = cost_from_joint(t, source, v);
            per.push_back({{"stratum", v.key()},
                           {"g", params[v].g.to_double()},
                           {"h", params[v].h.to_double()},
                           {"identification", "exact-from-joint"}});
        }
        for (const auto& v : t.strata(target))
            baselines[v] = t.counterfactual_risk(target, v, 0);
        weights = compute_weights(t, WeightKind::Prevalence, target);
        CostParams marg = standardize_cost(params, t, target);
        standardized = {{"g", marg.g.to_double()}, {"h", marg.h.to_double()}};
    } else {
        report["inputs"]["counts"] = counts_path;
        if (monotone.empty())
            throw ParseError("counts input requires --monotone increasing|decreasing");
        MonotoneDirection dir = monotone == "increasing"
                                    ? MonotoneDirection::Increasing
                                    : MonotoneDirection::Decreasing;
        StratifiedCounts counts = read_counts_file(counts_path);
        std::vector<std::string> v_set =
            v_set_csv.empty() ? counts.covariates() : split_list(v_set_csv);
        StratifiedCounts c = counts.marginalize(v_set);
        warn_small_cells(c, report);
        for (const auto& v : c.strata(source)) {
            params[v] = cost_identify_monotone(risk(c, source, v, 1),
                                               risk(c, source, v, 0), dir);
            per.push_back({{"stratum", v.key()},
                           {"g", params[v].g.to_double()},
                           {"h", params[v].h.to_double()},
                           {"identification", "monotone-" + monotone}});
        }
        for (const auto& v : c.strata(target))
            baselines[v] = risk(c, target, v, 0).rat();
        weights = compute_weights(c, WeightKind::Prevalence, target);
        CostParams marg = standardize_cost(params, c, target);
        standardized = {{"g", marg.g.to_double()}, {"h", marg.h.to_double()}};
    }

    TransportEstimate est = predict_target_risk(params, baselines, weights);
    report["cost"] = {{"per_stratum", per},
                      {"standardized", standardized},
                      {"prediction", estimate_json(est, &weights)}};
    for (const auto& w : est.warnings) report["warnings"].push_back(w);
    std::cout << "predicted target risk under treatment = " << *est.target_risk1
              << " (baseline " << *est.target_risk0 << ")\n";
    emit(report, out);
    return 0;
}

int run_check(const std::string& joint_path, const std::string& claim_name_arg,
              const std::string& given_csv, double tol, const Output& out) {
    PotentialOutcomeTable table = read_table_file(joint_path);
    HomogeneityClaim claim;
    claim.kind = claim_from_name(claim_name_arg);
    claim.conditioning =
        given_csv.empty() ? table.covariates() : split_list(given_csv);
    ClaimVerdict verdict = check_claim(table, claim, tol);

    json report = make_report("check", {{"joint", joint_path},
                                        {"claim", claim_name_arg},
                                        {"tol", tol}});
    json residuals = json::array();
    for (const auto& r : verdict.residuals)
        residuals.push_back({{"stratum", r.stratum.key()},
                             {"quantity", r.quantity},
                             {"reference", r.reference},
                             {"other", r.other},
                             {"residual", r.residual}});
    report["claim"] = {{"kind", claim_name_arg},
                       {"conditioning", claim.conditioning},
                       {"holds", verdict.holds},
                       {"max_residual", verdict.max_residual},
                       {"residuals", residuals}};
    std::cout << "claim '" << claim_name_arg << "' "
              << (verdict.holds ? "holds" : "fails") << " (max residual "
              << verdict.max_residual << ")\n";
    emit(report, out);
    return 0;
}

json fit_json(const LogisticFit& fit) {
    json coeffs = json::object(), ses = json::object();
    for (size_t i = 0; i < fit.names.size(); ++i) {
        coeffs[fit.names[i]] = fit.coefficients[i];
        ses[fit.names[i]] = std::sqrt(fit.covariance[i][i]);
    }
    return {{"converged", fit.converged},
            {"iterations", fit.iterations},
            {"deviance", fit.deviance},
            {"coefficients", coeffs},
            {"standard_errors", ses}};
}

int run_misspec(const std::string& records_path, double alpha, bool interaction,
                const Output& out) {
    LogisticData data = read_records_file(records_path);
    if (interaction) data = with_interaction(data);
    LogisticFit fit = fit_logistic(data);
    WaldResult wald = beta2_misspecification_test(fit, alpha);

    json report = make_report("misspec-test", {{"records", records_path},
                                               {"alpha", alpha}});
    report["fit"] = fit_json(fit);
    report["wald"] = {{"statistic", wald.statistic},
                      {"dof", wald.dof},
                      {"p_value", wald.p_value},
                      {"reject", wald.reject}};
    if (wald.reject)
        report["warnings"].push_back(
            "Wald test rejects beta2 = 0: homogeneity in distribution, "
            "exchangeability and the no-interaction logistic model cannot all hold");
    std::cout << "beta2 = " << fit.coefficient("p") << ", Wald = " << wald.statistic
              << ", p = " << wald.p_value << (wald.reject ? " (reject)" : "") << "\n";
    emit(report, out);
    return 0;
}

int run_simulate(const std::string& scenario_path, const std::string& out_prefix,
                 long long n, const std::string& assign_p, int replicates,
                 std::uint64_t seed_override, bool seed_given, const Output& out) {
    ScenarioSpec spec = parse_scenario_file(scenario_path);
    if (seed_given) spec.seed = seed_override;
    PotentialOutcomeTable table = make_table(spec);
    Rat assign = Rat::parse(assign_p);

    json files = json::object();
    json report = make_report("simulate", {{"scenario", scenario_path},
                                           {"seed", spec.seed},
                                           {"n", n},
                                           {"assignment_probability", assign_p}});
    {
        std::string path = out_prefix + "_joint.csv";
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ParseError("cannot write '" + path + "'");
        write_table_csv(table, f);
        files["joint"] = path;
    }
    if (n > 0) {
        TrialSample sample = sample_trial(table, n, assign, spec.seed);
        std::string cpath = out_prefix + "_counts.csv";
        std::ofstream cf(cpath, std::ios::binary);
        write_counts_csv(sample.counts, cf);
        files["counts"] = cpath;

        std::string rpath = out_prefix + "_records.csv";
        std::ofstream rf(rpath, std::ios::binary);
        rf << "y,a,p";
        for (const auto& c : table.covariates()) rf << "," << c;
        rf << "\n";
        for (const auto& rec : sample.records) {
            rf << rec.y << "," << rec.a << "," << (rec.population == kTarget ? 1 : 0);
            for (const auto& c : table.covariates()) rf << "," << rec.stratum.level(c);
            rf << "\n";
        }
        files["records"] = rpath;
    }
    report["simulation"] = {{"files", files}};

    if (replicates > 0) {
        if (n <= 0) throw ParseError("--replicates requires --n");
        // per-replicate seeds drawn serially, replicates fitted in parallel
        SplitMix64 seeder(spec.seed);
        std::vector<std::uint64_t> seeds(replicates);
        for (auto& s : seeds) s = seeder.next();
        std::vector<int> rejected(replicates, 0);
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < replicates; ++r) {
            TrialSample rep = sample_trial(table, n, assign, seeds[r]);
            LogisticData data =
                logistic_data_from_records(rep.records, table.covariates());
            try {
                LogisticFit fit = fit_logistic(data);
                WaldResult wald = beta2_misspecification_test(fit, 0.05);
                rejected[r] = wald.reject ? 1 : 0;
            } catch (const Error&) {
                rejected[r] = 0; // separated / degenerate replicate
            }
        }
        int total = 0;
        for (int r : rejected) total += r;
        double rate = static_cast<double>(total) / replicates;
        report["simulation"]["replicates"] = replicates;
        report["simulation"]["rejection_rate"] = rate;
        std::cout << "rejection rate over " << replicates << " replicates: " << rate
                  << "\n";
    } else {
        std::cout << "wrote " << files.size() << " file(s) with prefix '"
                  << out_prefix << "'\n";
    }
    emit(report, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transporting randomized-trial results to target populations"};
    app.require_subcommand(1);

    Output out;
    app.add_option("--json", out.json_path,
                   "write the JSON report to this path ('-' for stdout)");

    // dsep
    std::string diagram_path, qx, qy, qgiven;
    auto* dsep = app.add_subcommand("dsep", "d-separation / transportability query");
    dsep->add_option("diagram", diagram_path, "diagram file")->required();
    dsep->add_option("--x", qx, "query node (default: outcome)");
    dsep->add_option("--y", qy, "query node (default: selection)");
    dsep->add_option("--given", qgiven, "conditioning set, comma separated");

    // adjust-sets
    std::string adj_diagram, adj_candidates;
    int max_size = 6;
    auto* adj = app.add_subcommand("adjust-sets", "minimal sufficient adjustment sets");
    adj->add_option("diagram", adj_diagram, "diagram file")->required();
    adj->add_option("--candidates", adj_candidates, "candidate nodes, comma separated");
    adj->add_option("--max-size", max_size, "largest set size to search");

    // standardize
    std::string counts_path, approach, measure = "rr", v_set_csv;
    std::string target = kTarget, source = kStudy;
    auto* std_cmd = app.add_subcommand("standardize", "standardization estimators");
    std_cmd->add_option("counts", counts_path, "count CSV")->required();
    std_cmd->add_option("--approach", approach, "1|2|3|ipw")->required();
    std_cmd->add_option("--measure", measure, "rd|rr|or (approaches 1 and 2)");
    std_cmd->add_option("--v-set", v_set_csv, "covariates to standardize over");
    std_cmd->add_option("--target", target, "target population label");
    std_cmd->add_option("--source", source, "source population label");

    // cost
    std::string cost_joint, cost_counts, monotone, cost_vset;
    std::string cost_target = kTarget, cost_source = kStudy;
    auto* cost_cmd = app.add_subcommand("cost", "COST parameters and prediction");
    auto* jopt = cost_cmd->add_option("--joint", cost_joint, "joint counterfactual CSV");
    auto* copt = cost_cmd->add_option("--counts", cost_counts, "count CSV");
    cost_cmd->add_option("--monotone", monotone, "increasing|decreasing (with --counts)")
        ->check(CLI::IsMember({"increasing", "decreasing"}));
    cost_cmd->add_option("--v-set", cost_vset, "covariates to stratify on");
    cost_cmd->add_option("--target", cost_target, "target population label");
    cost_cmd->add_option("--source", cost_source, "source population label");
    jopt->excludes(copt);

    // check
    std::string check_joint, check_claim_name, check_given;
    double tol = 1e-12;
    auto* check_cmd = app.add_subcommand("check", "homogeneity claim checker");
    check_cmd->add_option("joint", check_joint, "joint counterfactual CSV")->required();
    check_cmd->add_option("--claim", check_claim_name,
                          "rd|rr|or|distribution|cost-introduce|cost-remove")
        ->required();
    check_cmd->add_option("--given", check_given, "conditioning covariates");
    check_cmd->add_option("--tol", tol, "comparison tolerance");

    // misspec-test
    std::string records_path;
    double alpha = 0.05;
    bool interaction = false;
    auto* mis = app.add_subcommand("misspec-test", "logistic fit + Wald test of beta2");
    mis->add_option("records", records_path, "record CSV (y,a,p,...)")->required();
    mis->add_option("--alpha", alpha, "test level");
    mis->add_flag("--interaction", interaction, "add the a*p product column");

    // simulate
    std::string scenario_path, out_prefix = "scenario", assign_p = "0.5";
    long long n = 0;
    int replicates = 0;
    std::uint64_t seed_override = 0;
    auto* sim = app.add_subcommand("simulate", "generate oracle tables and trial data");
    sim->add_option("scenario", scenario_path, "scenario file")->required();
    sim->add_option("--out-prefix", out_prefix, "output path prefix");
    sim->add_option("--n", n, "records per population to sample");
    sim->add_option("--assign-p", assign_p, "treatment assignment probability");
    sim->add_option("--replicates", replicates, "Monte Carlo replicates");
    auto* seed_opt = sim->add_option("--seed", seed_override, "override scenario seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dsep) return run_dsep(diagram_path, qx, qy, qgiven, out);
        if (*adj) return run_adjust_sets(adj_diagram, adj_candidates, max_size, out);
        if (*std_cmd)
            return run_standardize(counts_path, approach, measure, v_set_csv, target,
                                   source, out);
        if (*cost_cmd) {
            if (cost_joint.empty() && cost_counts.empty())
                throw ParseError("cost requires --joint or --counts");
            return run_cost(cost_joint, cost_counts, monotone, cost_vset, cost_target,
                            cost_source, out);
        }
        if (*check_cmd)
            return run_check(check_joint, check_claim_name, check_given, tol, out);
        if (*mis) return run_misspec(records_path, alpha, interaction, out);
        if (*sim)
            return run_simulate(scenario_path, out_prefix, n, assign_p, replicates,
                                seed_override, seed_opt->count() > 0, out);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.error_class() == ErrorClass::Identification ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
