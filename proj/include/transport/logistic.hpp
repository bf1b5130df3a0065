#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "transport/errors.hpp"

namespace transport {

// One (possibly weighted) observation. `x` holds the predictor values in
// the order given by LogisticData::columns; the intercept is implicit.
struct WeightedRecord {
    int y = 0;
    std::vector<double> x;
    double weight = 1.0;
};

struct LogisticData {
    std::vector<std::string> columns; // predictor names, no intercept
    std::vector<WeightedRecord> rows;
};

struct LogisticFit {
    std::vector<std::string> names; // "intercept" followed by predictors
    std::vector<double> coefficients;
    std::vector<std::vector<double>> covariance; // inverse Fisher information
    double deviance = 0.0;
    int iterations = 0;
    bool converged = false;

    double coefficient(const std::string& name) const;
    double variance(const std::string& name) const;
};

// Maximum likelihood via iteratively reweighted least squares.
// Converges when |Δdeviance| < 1e-10; at most 100 iterations.
LogisticFit fit_logistic(const LogisticData& data);

struct WaldResult {
    double statistic = 0.0;
    int dof = 1;
    double p_value = 1.0;
    bool reject = false;
};

// Wald test of the population coefficient (the "p" column) against zero.
// Rejection means homogeneity in distribution, exchangeability and the
// no-interaction model cannot all hold.
WaldResult beta2_misspecification_test(const LogisticFit& fit, double alpha);

// Log-likelihood and score at an arbitrary coefficient vector (test hooks
// for gradient / Hessian checks).
double log_likelihood(const LogisticData& data, const std::vector<double>& beta);
std::vector<double> score(const LogisticData& data, const std::vector<double>& beta);
std::vector<std::vector<double>> fisher_information(const LogisticData& data,
                                                    const std::vector<double>& beta);

// Upper tail of chi-square with 1 degree of freedom, via the regularized
// incomplete gamma function. Absolute accuracy ~1e-10.
double chi_square1_sf(double x);

// Record CSV with header "y,a,p,<covariates...>[,weight]".
LogisticData read_records_csv(std::istream& in);
LogisticData read_records_file(const std::string& path);
// Appends an a*p product column ("a_x_p"); diagnostic enriched model.
LogisticData with_interaction(const LogisticData& data);

} // namespace transport
