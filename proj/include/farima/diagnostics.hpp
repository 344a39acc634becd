#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "farima/covariance.hpp"
#include "farima/distributions.hpp"
#include "farima/estimate.hpp"
#include "farima/lobato.hpp"
#include "farima/portmanteau.hpp"

namespace farima {

/// Per-lag residual autocorrelation with the three 5%-band families.
struct AcfBandRow {
    int lag = 0;
    double rho = 0.0;
    double band_strong = 0.0;  // from the strong-case Sigma^S diagonal
    double band_weak = 0.0;    // from the estimated Sigma_rho diagonal
    double band_sn = 0.0;      // from the C_hat diagonal and the U_1 critical value
};

/// Whole-series diagnosis: fit summary, all six tests per m, ACF band data.
struct DiagnosisReport {
    int p = 0, q = 0;
    std::size_t n = 0;
    FarimaParams theta_hat;
    std::vector<double> std_errors;  // from Sigma_theta_hat = J^-1 I J^-1 diagonal
    std::vector<double> p_values;    // two-sided Gaussian
    double sigma2_hat = 0.0;
    bool converged = false;
    int ar_order_used = 0;
    double level = 0.05;
    std::vector<TestReport> tests;   // 6 per m, m = 1..m_max
    std::vector<AcfBandRow> acf_rows;
    std::vector<std::string> warnings;
};

/**
 * @brief End-to-end diagnosis of a FARIMA(p,d,q) fit.
 *
 * Fits by least squares, builds the spectral covariance, then runs the
 * standard, modified (weak) and self-normalized portmanteau tests for every
 * m = 1..m_max at the requested level. Fit non-convergence and singular SN
 * normalizations are reported as warnings, not thrown.
 */
inline DiagnosisReport run_diagnosis(std::span<const double> x, int p, int q, int m_max,
                                     double level, const LobatoTable& lobato,
                                     const FitOptions& opts = {}, int ar_order = -1) {
    if (m_max < 1) throw std::invalid_argument("run_diagnosis: m_max must be >= 1");
    DiagnosisReport rep;
    rep.p = p;
    rep.q = q;
    rep.n = x.size();
    rep.level = level;

    FitResult fr = fit(x, p, q, opts);
    rep.theta_hat = fr.theta_hat;
    rep.sigma2_hat = fr.sigma2_hat;
    rep.converged = fr.converged;
    if (!fr.converged) rep.warnings.push_back("fit did not meet the gradient tolerance");

    const int k0 = fr.theta_hat.dim();
    const double n = static_cast<double>(rep.n);
    const double z = normal_quantile(1.0 - 0.5 * level);

    // covariance pipeline at the largest lag
    const Eigen::MatrixXd psi_m = psi_hat(fr.residual_set, m_max);
    const UhatSeries u = u_hat(fr.residual_set, fr.j_hat, m_max);
    const SpectralXi sx = spectral_ar_xi(u.values, ar_order);
    rep.ar_order_used = sx.r_used;
    const RhoCovariance cov =
        assemble_sigma_rho(psi_m, sx.xi, fr.sigma2_hat, m_max, sx.r_used);

    // fit summary: standard errors from the Sigma_theta block of Xi
    const Eigen::MatrixXd sigma_theta = sx.xi.topLeftCorner(k0, k0);
    rep.std_errors.resize(static_cast<std::size_t>(k0));
    rep.p_values.resize(static_cast<std::size_t>(k0));
    const std::vector<double> packed = fr.theta_hat.packed();
    for (int i = 0; i < k0; ++i) {
        const double se = std::sqrt(std::max(sigma_theta(i, i), 0.0) / n);
        rep.std_errors[static_cast<std::size_t>(i)] = se;
        rep.p_values[static_cast<std::size_t>(i)] =
            se > 0.0 ? 2.0 * (1.0 - normal_cdf(std::abs(packed[static_cast<std::size_t>(i)]) / se))
                     : 0.0;
    }

    // ACF bands
    const AcfSet a = acf(fr.residual_set.residuals, m_max);
    const Eigen::MatrixXd strong = strong_sigma_rho(psi_m, fr.j_hat, fr.sigma2_hat, m_max);
    const SnMatrices sn = sn_matrices(u, psi_m, a);
    const double u1_crit = critical_value(lobato, 1, 1.0 - level);
    for (int h = 1; h <= m_max; ++h) {
        AcfBandRow row;
        row.lag = h;
        row.rho = a.rho[static_cast<std::size_t>(h - 1)];
        row.band_strong = z * std::sqrt(std::max(strong(h - 1, h - 1), 0.0) / n);
        row.band_weak = z * std::sqrt(std::max(cov.sigma_rho(h - 1, h - 1), 0.0) / n);
        row.band_sn = std::sqrt(u1_crit * std::max(sn.c_hat(h - 1, h - 1), 0.0) / n) /
                      fr.sigma2_hat;
        rep.acf_rows.push_back(row);
    }

    // all six tests for every m
    const double levels[1] = {level};
    const double sn_levels[1] = {1.0 - level};
    for (int m = 1; m <= m_max; ++m) {
        auto [bps, lbs] = standard_portmanteau(fr, m, levels);
        RhoCovariance cov_m = cov;
        if (m != m_max) {
            const SpectralXi sx_m =
                spectral_ar_xi(u_hat(fr.residual_set, fr.j_hat, m).values, ar_order);
            cov_m = assemble_sigma_rho(psi_hat(fr.residual_set, m), sx_m.xi, fr.sigma2_hat, m,
                                       sx_m.r_used);
        }
        auto [bpw, lbw] = weak_portmanteau(fr, cov_m, m, levels);
        rep.tests.push_back(bps);
        rep.tests.push_back(lbs);
        rep.tests.push_back(bpw);
        rep.tests.push_back(lbw);
        try {
            const UhatSeries u_m = m == m_max ? u : u_hat(fr.residual_set, fr.j_hat, m);
            const Eigen::MatrixXd psi_sub = m == m_max ? psi_m : psi_hat(fr.residual_set, m);
            auto [bpsn, lbsn] = sn_portmanteau(fr, u_m, psi_sub, m, lobato, sn_levels);
            rep.tests.push_back(bpsn);
            rep.tests.push_back(lbsn);
        } catch (const std::exception& e) {
            rep.warnings.push_back("sn test failed at m=" + std::to_string(m) + ": " + e.what());
            TestReport failed;
            failed.m = m;
            failed.not_applicable = true;
            failed.method = TestMethod::bp_sn;
            rep.tests.push_back(failed);
            failed.method = TestMethod::lb_sn;
            rep.tests.push_back(failed);
        }
    }
    return rep;
}

/// Machine-readable serialization: one `key=value` record line per item.
inline void write_report(std::ostream& out, const DiagnosisReport& rep) {
    out.precision(10);
    out << "[model] p=" << rep.p << " q=" << rep.q << " n=" << rep.n
        << " sigma2=" << rep.sigma2_hat << " converged=" << (rep.converged ? 1 : 0)
        << " ar_order=" << rep.ar_order_used << " level=" << rep.level << "\n";
    const std::vector<double> packed = rep.theta_hat.packed();
    const char* names[] = {"ar", "ma", "d"};
    for (std::size_t i = 0; i < packed.size(); ++i) {
        const int p = rep.p, q = rep.q;
        std::string name;
        int idx = static_cast<int>(i);
        if (idx < p)
            name = std::string(names[0]) + std::to_string(idx + 1);
        else if (idx < p + q)
            name = std::string(names[1]) + std::to_string(idx - p + 1);
        else
            name = names[2];
        out << "[coef] name=" << name << " value=" << packed[i]
            << " se=" << rep.std_errors[i] << " p_value=" << rep.p_values[i] << "\n";
    }
    for (const auto& t : rep.tests) {
        out << "[test] m=" << t.m << " method=" << method_name(t.method)
            << " statistic=" << t.statistic;
        if (t.not_applicable) out << " na=1";
        if (t.p_value) out << " p_value=" << *t.p_value;
        if (t.critical_value) out << " critical_value=" << *t.critical_value;
        if (t.df) out << " df=" << *t.df;
        for (const auto& [alpha, rej] : t.reject_at)
            out << " reject@" << alpha << "=" << (rej ? 1 : 0);
        out << "\n";
    }
    for (const auto& row : rep.acf_rows) {
        out << "[acf] lag=" << row.lag << " rho=" << row.rho
            << " band_strong=" << row.band_strong << " band_weak=" << row.band_weak
            << " band_sn=" << row.band_sn << "\n";
    }
    for (const auto& w : rep.warnings) out << "[warning] " << w << "\n";
}

/// Record type for the round-trip parser (schema stability check).
struct ReportRecord {
    std::string tag;
    std::vector<std::pair<std::string, std::string>> fields;
};

inline std::vector<ReportRecord> parse_report(std::istream& in) {
    std::vector<ReportRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '[') continue;
        const auto close = line.find(']');
        if (close == std::string::npos) continue;
        ReportRecord rec;
        rec.tag = line.substr(1, close - 1);
        std::istringstream ss(line.substr(close + 1));
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                rec.fields.emplace_back(tok, "");
            else
                rec.fields.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace farima
