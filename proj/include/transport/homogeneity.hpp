#pragma once

#include <string>
#include <vector>

#include "transport/core.hpp"
#include "transport/joint.hpp"
#include "transport/table.hpp"

namespace transport {

// The six rows of the homogeneity taxonomy.
enum class ClaimKind {
    MeasureRD,
    MeasureRR,
    MeasureOR,
    Distribution,  // S-ignorability: Y^a independent of P given V, both a
    CostIntroduce, // Y^1 independent of P given (Y^0, V): shared (G, H)
    CostRemove,    // Y^0 independent of P given (Y^1, V)
};

std::string claim_name(ClaimKind kind);
ClaimKind claim_from_name(const std::string& name);

struct HomogeneityClaim {
    ClaimKind kind;
    std::vector<std::string> conditioning; // covariate subset V
};

struct StratumResidual {
    Stratum stratum;
    std::string quantity;   // e.g. "rr", "Pr(Y^1=1)", "G"
    double reference = 0.0; // first population
    double other = 0.0;
    double residual = 0.0;
};

struct ClaimVerdict {
    bool holds = false;
    double max_residual = 0.0;
    std::vector<StratumResidual> residuals;
};

// Compares the claim's quantity across populations within each stratum of
// the conditioning set; residuals are exact up to the supplied tolerance.
ClaimVerdict check_claim(const PotentialOutcomeTable& table,
                         const HomogeneityClaim& claim, double tol = 1e-12);

// Exact test of X independent of Y given Z in an enumerated distribution:
// integer cross-multiplication, no tolerance needed. Guarded at 20 variables.
bool exact_conditional_independence(const JointDistribution& joint, int x, int y,
                                    const std::vector<int>& given);
bool exact_conditional_independence(const JointDistribution& joint,
                                    const std::string& x, const std::string& y,
                                    const std::vector<std::string>& given);

} // namespace transport
