#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "farima/covariance.hpp"
#include "farima/distributions.hpp"
#include "farima/estimate.hpp"
#include "farima/imhof.hpp"
#include "farima/lobato.hpp"

namespace farima {

/// Residual autocovariances gamma(0..m) and autocorrelations rho(1..m),
/// with gamma(h) = n^{-1} sum_{t=h+1}^n e_t e_{t-h}.
struct AcfSet {
    std::vector<double> gamma;  // index 0..m
    std::vector<double> rho;    // index 0 holds rho(1)
    std::size_t n = 0;
    int m = 0;
};

inline AcfSet acf(std::span<const double> residuals, int m) {
    const std::size_t n = residuals.size();
    if (m < 0 || static_cast<std::size_t>(m) >= n)
        throw std::invalid_argument("acf: need 0 <= m < n");
    AcfSet out;
    out.n = n;
    out.m = m;
    out.gamma.resize(static_cast<std::size_t>(m) + 1);
    for (int h = 0; h <= m; ++h) {
        double s = 0.0;
        for (std::size_t t = static_cast<std::size_t>(h); t < n; ++t)
            s += residuals[t] * residuals[t - static_cast<std::size_t>(h)];
        out.gamma[static_cast<std::size_t>(h)] = s / static_cast<double>(n);
    }
    if (out.gamma[0] <= 0.0) throw std::domain_error("acf: gamma(0) must be positive");
    out.rho.resize(static_cast<std::size_t>(m));
    for (int h = 1; h <= m; ++h)
        out.rho[static_cast<std::size_t>(h - 1)] =
            out.gamma[static_cast<std::size_t>(h)] / out.gamma[0];
    return out;
}

struct BpLbStats {
    double q_bp = 0.0;
    double q_lb = 0.0;
};

/// Box-Pierce and Ljung-Box statistics from the first m autocorrelations.
inline BpLbStats bp_lb(const AcfSet& a) {
    if (a.m < 1) throw std::invalid_argument("bp_lb: m must be >= 1");
    BpLbStats s;
    const double n = static_cast<double>(a.n);
    for (int h = 1; h <= a.m; ++h) {
        const double r2 = a.rho[static_cast<std::size_t>(h - 1)] * a.rho[static_cast<std::size_t>(h - 1)];
        s.q_bp += r2;
        s.q_lb += r2 / (n - static_cast<double>(h));
    }
    s.q_bp *= n;
    s.q_lb *= n * (n + 2.0);
    return s;
}

enum class TestMethod { bp_standard, lb_standard, bp_weak, lb_weak, bp_sn, lb_sn };

inline const char* method_name(TestMethod m) {
    switch (m) {
        case TestMethod::bp_standard: return "bp_standard";
        case TestMethod::lb_standard: return "lb_standard";
        case TestMethod::bp_weak: return "bp_weak";
        case TestMethod::lb_weak: return "lb_weak";
        case TestMethod::bp_sn: return "bp_sn";
        case TestMethod::lb_sn: return "lb_sn";
    }
    return "?";
}

/**
 * @brief One portmanteau test outcome.
 *
 * Standard and weak methods carry a p-value; the self-normalized methods
 * carry the critical value at the primary level instead. Standard tests with
 * m <= p+q+1 are reported not applicable, mirroring the n.a. table cells.
 */
struct TestReport {
    TestMethod method = TestMethod::bp_standard;
    int m = 0;
    double statistic = 0.0;
    std::optional<double> p_value;
    std::optional<double> critical_value;  // SN route, at the primary level
    std::vector<double> eigenvalues;       // weak route
    std::optional<int> df;                 // standard route
    bool not_applicable = false;
    std::map<double, bool> reject_at;  // test level alpha -> decision
};

/// Modified (weak) tests: p-values of Q against the weighted chi-square null
/// Z_m(xi_hat) via the Imhof inversion.
inline std::pair<TestReport, TestReport> weak_portmanteau(
    const FitResult& fit_result, const RhoCovariance& cov, int m,
    std::span<const double> levels = std::span<const double>()) {
    if (static_cast<int>(cov.eigenvalues.size()) != m)
        throw std::invalid_argument("weak_portmanteau: covariance built at a different m");
    double max_ev = 0.0;
    for (double v : cov.eigenvalues) max_ev = std::max(max_ev, v);
    if (max_ev <= 0.0) throw std::domain_error("weak_portmanteau: all eigenvalues are zero");
    const AcfSet a = acf(fit_result.residual_set.residuals, m);
    const BpLbStats s = bp_lb(a);
    static const double kDefaultLevels[] = {0.10, 0.05, 0.01};
    std::span<const double> lv = levels.empty() ? std::span<const double>(kDefaultLevels) : levels;

    auto make = [&](TestMethod method, double stat) {
        TestReport r;
        r.method = method;
        r.m = m;
        r.statistic = stat;
        r.eigenvalues = cov.eigenvalues;
        r.p_value = imhof_tail(cov.eigenvalues, stat);
        for (double alpha : lv) r.reject_at[alpha] = *r.p_value < alpha;
        return r;
    };
    return {make(TestMethod::bp_weak, s.q_bp), make(TestMethod::lb_weak, s.q_lb)};
}

/// Standard tests against chi2_{m-(p+q+1)}; not applicable when m <= p+q+1.
inline std::pair<TestReport, TestReport> standard_portmanteau(
    const FitResult& fit_result, int m, std::span<const double> levels = std::span<const double>()) {
    const int k0 = fit_result.theta_hat.dim();
    const AcfSet a = acf(fit_result.residual_set.residuals, m);
    const BpLbStats s = bp_lb(a);
    static const double kDefaultLevels[] = {0.10, 0.05, 0.01};
    std::span<const double> lv = levels.empty() ? std::span<const double>(kDefaultLevels) : levels;

    auto make = [&](TestMethod method, double stat) {
        TestReport r;
        r.method = method;
        r.m = m;
        r.statistic = stat;
        if (m <= k0) {
            r.not_applicable = true;
            return r;
        }
        r.df = m - k0;
        r.p_value = chi2_survival(stat, static_cast<double>(*r.df));
        for (double alpha : lv) r.reject_at[alpha] = *r.p_value < alpha;
        return r;
    };
    return {make(TestMethod::bp_standard, s.q_bp), make(TestMethod::lb_standard, s.q_lb)};
}

/// Self-normalization matrices: Lambda_hat = (Psi_hat | I_m) and
/// C_hat = n^{-2} sum_t S_t S_t' with S_t the running partial sums of
/// Lambda_hat U_j - gamma_hat_m, accumulated in one pass.
struct SnMatrices {
    Eigen::MatrixXd c_hat;       // m x m
    Eigen::MatrixXd lambda_hat;  // m x (p+q+1+m)
};

inline SnMatrices sn_matrices(const UhatSeries& u, const Eigen::MatrixXd& psi, const AcfSet& a) {
    const int m = u.m;
    const int k0 = u.n_model_params;
    if (psi.rows() != m || psi.cols() != k0)
        throw std::invalid_argument("sn_matrices: psi dimensions inconsistent with u");
    if (a.m != m) throw std::invalid_argument("sn_matrices: acf built at a different m");
    const Eigen::Index n = u.values.rows();
    SnMatrices out;
    out.lambda_hat.resize(m, k0 + m);
    out.lambda_hat.leftCols(k0) = psi;
    out.lambda_hat.rightCols(m) = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd gamma_m(m);
    for (int h = 1; h <= m; ++h) gamma_m(h - 1) = a.gamma[static_cast<std::size_t>(h)];
    Eigen::VectorXd running = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index t = 0; t < n; ++t) {
        running += psi * u.values.row(t).head(k0).transpose() +
                   u.values.row(t).tail(m).transpose() - gamma_m;
        c.selfadjointView<Eigen::Lower>().rankUpdate(running, 1.0);
    }
    out.c_hat = Eigen::MatrixXd(c.selfadjointView<Eigen::Lower>()) /
                (static_cast<double>(n) * static_cast<double>(n));
    return out;
}

/**
 * @brief Self-normalized tests compared to Lobato U_m critical values.
 *
 * Q^SN = n sigma^4 rho' C^{-1} rho (BP flavour) and the Ljung-Box flavour
 * weights rho by D_{n,m}^{1/2} with D = diag((n+2)/(n-1),...,(n+2)/(n-m)).
 * A numerically singular C_hat raises an error naming its smallest eigenvalue.
 */
inline std::pair<TestReport, TestReport> sn_portmanteau(
    const FitResult& fit_result, const UhatSeries& u, const Eigen::MatrixXd& psi, int m,
    const LobatoTable& table, std::span<const double> levels = std::span<const double>()) {
    if (u.m != m) throw std::invalid_argument("sn_portmanteau: u built at a different m");
    const AcfSet a = acf(fit_result.residual_set.residuals, m);
    const SnMatrices sn = sn_matrices(u, psi, a);
    const double n = static_cast<double>(a.n);
    const double sig4 = fit_result.sigma2_hat * fit_result.sigma2_hat;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sn.c_hat);
    if (es.info() != Eigen::Success) throw std::runtime_error("sn_portmanteau: eigen solve failed");
    const double ev_min = es.eigenvalues()(0);
    const double ev_max = es.eigenvalues()(m - 1);
    if (!(ev_min > 0.0) || ev_max / ev_min > 1e12)
        throw std::runtime_error("sn_portmanteau: C_hat numerically singular, smallest eigenvalue " +
                                 std::to_string(ev_min));

    Eigen::VectorXd rho(m), rho_lb(m);
    for (int h = 1; h <= m; ++h) {
        rho(h - 1) = a.rho[static_cast<std::size_t>(h - 1)];
        rho_lb(h - 1) = rho(h - 1) * std::sqrt((n + 2.0) / (n - static_cast<double>(h)));
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sn.c_hat);
    const double q_sn = n * sig4 * rho.dot(llt.solve(rho));
    const double q_sn_lb = n * sig4 * rho_lb.dot(llt.solve(rho_lb));

    static const double kDefaultLevels[] = {0.95};
    std::span<const double> lv = levels.empty() ? std::span<const double>(kDefaultLevels) : levels;
    auto make = [&](TestMethod method, double stat) {
        TestReport r;
        r.method = method;
        r.m = m;
        r.statistic = stat;
        r.critical_value = critical_value(table, m, lv.front());
        for (double level : lv) r.reject_at[1.0 - level] = stat > critical_value(table, m, level);
        return r;
    };
    return {make(TestMethod::bp_sn, q_sn), make(TestMethod::lb_sn, q_sn_lb)};
}

}  // namespace farima
