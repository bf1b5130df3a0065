#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "transport/core.hpp"
#include "transport/cost.hpp"
#include "transport/diagram.hpp"
#include "transport/joint.hpp"
#include "transport/logistic.hpp"
#include "transport/table.hpp"

namespace transport {

// SplitMix64 (Steele, Lea & Flood mixing generator): 64-bit state,
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
// Chosen over the platform generators so streams are reproducible across
// compilers and languages. The sampling paths below use only integer
// comparisons against rational thresholds.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, bound) by rejection; no modulo bias
    std::uint64_t below(std::uint64_t bound);
    // uniform in [lo, hi] inclusive
    long long range(long long lo, long long hi);
    // true with exact probability p (0 <= p <= 1)
    bool bernoulli(const Rat& p);

private:
    std::uint64_t state_;
};

enum class ScenarioProperty {
    None,
    Distribution,
    MeasureRD,
    MeasureRR,
    MeasureOR,
    Cost,
    MarginalNotJoint,
};

enum class MonotoneScenario { Free, Increasing, Decreasing };

struct ScenarioSpec {
    ScenarioProperty enforce = ScenarioProperty::Distribution;
    int strata = 2;
    Rat baseline_gap = Rat(0); // study/target baseline risk gap (Cost scenarios)
    Rat violation = Rat(0);    // minimum residual for the complementary claim
    MonotoneScenario monotone = MonotoneScenario::Free;
    std::uint64_t seed = 0;
};

// Key-value text: "enforce = distribution", "strata = 4",
// "baseline_gap = 0.2", "violation = 1/8", "monotone = increasing",
// "seed = 42".
ScenarioSpec parse_scenario(const std::string& text);
ScenarioSpec parse_scenario_file(const std::string& path);

// Builds an exact two-population table satisfying the enforced claim
// identically (self-verified via check_claim before return) and violating
// the complementary claim by at least `violation` where one is requested.
PotentialOutcomeTable make_table(const ScenarioSpec& spec);

struct TrialRecord {
    PopulationId population;
    Stratum stratum;
    int a = 0;
    int y = 0;
    int y0 = 0; // latent truth, kept for oracle checks
    int y1 = 0;
};

struct TrialSample {
    std::vector<TrialRecord> records;
    StratifiedCounts counts;
};

// Randomized treatment assignment independent of (Y^0, Y^1) given the
// stratum; observed outcome set by consistency. Bit-reproducible per seed.
TrialSample sample_trial(const PotentialOutcomeTable& table,
                         long long n_per_population, const Rat& assignment_prob,
                         std::uint64_t seed);

// Record-level view for the logistic machinery: columns a, p (1 = target),
// then one column per covariate.
LogisticData logistic_data_from_records(const std::vector<TrialRecord>& records,
                                        const std::vector<std::string>& covariates);

// Binary structural model over a diagram: per node, Pr(node=1 | parents)
// indexed by parent bits (parents ascending by node index). Probabilities
// must have power-of-two denominators so enumeration stays exact.
struct StructuralModelSpec {
    SelectionDiagram diagram;
    std::vector<std::vector<Rat>> cpts; // cpts[i].size() == 2^parents(i)
};

JointDistribution enumerate_joint(const StructuralModelSpec& model);

// Random DAG on nodes X0..X{n-1} in topological order with the given edge
// probability; X0 is the selection node (root), treatment/outcome drawn
// from the rest.
SelectionDiagram random_diagram(int n_nodes, const Rat& edge_prob, SplitMix64& rng);
StructuralModelSpec random_model(const SelectionDiagram& g, SplitMix64& rng,
                                 int den_exp = 4);

struct TargetQuantities {
    Rat risk1, risk0;
    std::vector<EffectMeasure> measures; // those defined at these risks
    CostParams pooled_cost;
    std::map<Stratum, CostParams> stratum_cost;
    std::map<Stratum, Rat> stratum_risk1, stratum_risk0;
};

// Exact answer key against which every estimator is scored.
TargetQuantities true_target_quantities(const PotentialOutcomeTable& table,
                                        const PopulationId& target);

// Structural logistic population for the misspecification test: outcome
// follows logit Pr = b0 + b1*a + b2*p + sum_j b4[j]*v_j (+ bu*u for the
// shifted unmeasured cause), covariate prevalences per population.
struct LogisticPopulationSpec {
    double b0 = 0, b1 = 0, b2 = 0;
    std::vector<double> b4;
    std::vector<double> cov_prev_study, cov_prev_target; // Pr(V_j=1 | P)
    double target_share = 0.5; // Pr(P = target)
    double assign_prob = 0.5;
    double bu = 0; // unmeasured cause effect; active when u_prev differs
    double u_prev_study = 0, u_prev_target = 0;
    bool has_unmeasured = false;
};

// Exact weighted population (one weighted record per configuration and
// outcome); lets the appendix identity be tested without sampling noise.
LogisticData exact_population_records(const LogisticPopulationSpec& spec);
LogisticData sample_logistic_records(const LogisticPopulationSpec& spec,
                                     long long n, std::uint64_t seed);

} // namespace transport
