#include "transport/logistic.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

namespace transport {

namespace {

double expit(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

Eigen::MatrixXd design_matrix(const LogisticData& data) {
    const auto n = static_cast<Eigen::Index>(data.rows.size());
    const auto k = static_cast<Eigen::Index>(data.columns.size()) + 1;
    Eigen::MatrixXd X(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = data.rows[i];
        if (static_cast<Eigen::Index>(row.x.size()) + 1 != k)
            throw ParseError("record has " + std::to_string(row.x.size()) +
                             " predictors, expected " + std::to_string(k - 1));
        X(i, 0) = 1.0;
        for (Eigen::Index j = 1; j < k; ++j) X(i, j) = row.x[j - 1];
    }
    return X;
}

} // namespace

double LogisticFit::coefficient(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return coefficients[i];
    throw ParseError("no coefficient named '" + name + "'");
}

double LogisticFit::variance(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return covariance[i][i];
    throw ParseError("no coefficient named '" + name + "'");
}

LogisticFit fit_logistic(const LogisticData& data) {
    if (data.rows.empty()) throw ParseError("no records to fit");
    Eigen::MatrixXd X = design_matrix(data);
    const Eigen::Index n = X.rows(), k = X.cols();

    Eigen::VectorXd y(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = data.rows[i];
        if (row.y != 0 && row.y != 1) throw ParseError("outcome must be 0 or 1");
        if (row.weight < 0) throw ParseError("negative record weight");
        y(i) = row.y;
        w(i) = row.weight;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
    double dev_prev = std::numeric_limits<double>::infinity();
    double dev = 0.0;
    int iter = 0;
    bool converged = false;
    Eigen::MatrixXd info(k, k);

    for (iter = 1; iter <= 100; ++iter) {
        Eigen::VectorXd eta = X * beta;
        Eigen::VectorXd mu(n), ww(n);
        dev = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            mu(i) = expit(eta(i));
            ww(i) = w(i) * mu(i) * (1.0 - mu(i));
            if (w(i) > 0) {
                double m = std::min(std::max(mu(i), 1e-300), 1.0 - 1e-16);
                dev -= 2.0 * w(i) * (y(i) * std::log(m) + (1.0 - y(i)) * std::log1p(-m));
            }
        }
        info = X.transpose() * ww.asDiagonal() * X;
        Eigen::VectorXd grad = X.transpose() * (w.cwiseProduct(y - mu));

        Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
        lu.setThreshold(1e-10);
        if (lu.rank() < k)
            throw RankDeficient("design matrix is rank deficient (" +
                                std::to_string(lu.rank()) + " of " +
                                std::to_string(k) + " columns identified)");
        beta += lu.solve(grad);

        if (beta.cwiseAbs().maxCoeff() > 30.0)
            throw SeparationDetected(
                "coefficients diverging (|beta| > 30); data are separated");
        if (std::abs(dev - dev_prev) < 1e-10) { converged = true; break; }
        dev_prev = dev;
    }

    // covariance at the final coefficients
    Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd ww(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double mu = expit(eta(i));
        ww(i) = w(i) * mu * (1.0 - mu);
    }
    info = X.transpose() * ww.asDiagonal() * X;
    Eigen::MatrixXd cov = info.inverse();

    LogisticFit fit;
    fit.names.push_back("intercept");
    for (const auto& c : data.columns) fit.names.push_back(c);
    fit.coefficients.assign(beta.data(), beta.data() + k);
    fit.covariance.assign(k, std::vector<double>(k));
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) fit.covariance[i][j] = cov(i, j);
    fit.deviance = dev;
    fit.iterations = iter;
    fit.converged = converged;
    return fit;
}

WaldResult beta2_misspecification_test(const LogisticFit& fit, double alpha) {
    if (!fit.converged)
        throw NotConverged("logistic fit did not converge; Wald test unavailable");
    double b = fit.coefficient("p");
    double var = fit.variance("p");
    WaldResult res;
    res.statistic = var > 0 ? b * b / var : (b == 0.0 ? 0.0 : INFINITY);
    res.dof = 1;
    res.p_value = chi_square1_sf(res.statistic);
    res.reject = res.p_value < alpha;
    return res;
}

double log_likelihood(const LogisticData& data, const std::vector<double>& beta) {
    double ll = 0.0;
    for (const auto& row : data.rows) {
        double eta = beta.at(0);
        for (size_t j = 0; j < row.x.size(); ++j) eta += beta.at(j + 1) * row.x[j];
        // log-lik contribution: y*eta - log(1 + e^eta), numerically stable
        double log1pe = eta > 0 ? eta + std::log1p(std::exp(-eta))
                                : std::log1p(std::exp(eta));
        ll += row.weight * (row.y * eta - log1pe);
    }
    return ll;
}

std::vector<double> score(const LogisticData& data, const std::vector<double>& beta) {
    std::vector<double> g(beta.size(), 0.0);
    for (const auto& row : data.rows) {
        double eta = beta.at(0);
        for (size_t j = 0; j < row.x.size(); ++j) eta += beta.at(j + 1) * row.x[j];
        double resid = row.weight * (row.y - expit(eta));
        g[0] += resid;
        for (size_t j = 0; j < row.x.size(); ++j) g[j + 1] += resid * row.x[j];
    }
    return g;
}

std::vector<std::vector<double>> fisher_information(const LogisticData& data,
                                                    const std::vector<double>& beta) {
    size_t k = beta.size();
    std::vector<std::vector<double>> info(k, std::vector<double>(k, 0.0));
    for (const auto& row : data.rows) {
        double eta = beta.at(0);
        for (size_t j = 0; j < row.x.size(); ++j) eta += beta.at(j + 1) * row.x[j];
        double mu = expit(eta);
        double wv = row.weight * mu * (1.0 - mu);
        std::vector<double> xi(k, 1.0);
        for (size_t j = 0; j < row.x.size(); ++j) xi[j + 1] = row.x[j];
        for (size_t a = 0; a < k; ++a)
            for (size_t b = 0; b < k; ++b) info[a][b] += wv * xi[a] * xi[b];
    }
    return info;
}

namespace {

// Regularized incomplete gamma: series for x < a+1, continued fraction
// otherwise (Numerical Recipes gser/gcf split).
double gamma_p_series(double a, double x) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double chi_square1_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double a = 0.5, z = x / 2.0;
    return z < a + 1.0 ? 1.0 - gamma_p_series(a, z) : gamma_q_contfrac(a, z);
}

LogisticData read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty record file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            auto b = f.find_first_not_of(" \t\r");
            auto e = f.find_last_not_of(" \t\r");
            header.push_back(b == std::string::npos ? "" : f.substr(b, e - b + 1));
        }
    }
    if (header.size() < 3 || header[0] != "y" || header[1] != "a" || header[2] != "p")
        throw ParseError("record file header must be y,a,p,<covariates...>[,weight]");
    bool weighted = header.back() == "weight";
    size_t ncov = header.size() - 3 - (weighted ? 1 : 0);

    LogisticData data;
    data.columns.push_back("a");
    data.columns.push_back("p");
    for (size_t i = 0; i < ncov; ++i) data.columns.push_back(header[3 + i]);

    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(lineno) + ": expected " +
                             std::to_string(header.size()) + " fields");
        try {
            WeightedRecord row;
            row.y = std::stoi(fields[0]);
            row.x.push_back(std::stod(fields[1]));
            row.x.push_back(std::stod(fields[2]));
            for (size_t i = 0; i < ncov; ++i) row.x.push_back(std::stod(fields[3 + i]));
            row.weight = weighted ? std::stod(fields.back()) : 1.0;
            data.rows.push_back(std::move(row));
        } catch (const std::invalid_argument&) {
            throw ParseError("line " + std::to_string(lineno) + ": bad numeric field");
        }
    }
    return data;
}

LogisticData read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return read_records_csv(in);
}

LogisticData with_interaction(const LogisticData& data) {
    LogisticData out = data;
    out.columns.push_back("a_x_p");
    for (auto& row : out.rows) row.x.push_back(row.x.at(0) * row.x.at(1));
    return out;
}

} // namespace transport
