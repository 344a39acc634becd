#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "farima/estimate.hpp"
#include "farima/model.hpp"

namespace farima {

/**
 * @brief Rows t = 1..n of the plug-in process U_hat_t.
 *
 * The first p+q+1 columns hold -2 J_hat^{-1} e_t de_t/dtheta, the last m
 * columns hold (e_{t-1}, ..., e_{t-m}) e_t with out-of-range lags set to 0.
 */
struct UhatSeries {
    Eigen::MatrixXd values;  // n x (p+q+1+m)
    int n_model_params = 0;  // p+q+1
    int m = 0;
};

/// Psi_hat_m = n^{-1} sum_t (e_{t-1},...,e_{t-m})' de_t/dtheta'  (m x (p+q+1)).
inline Eigen::MatrixXd psi_hat(const ResidualSet& rs, int m) {
    if (m < 1) throw std::invalid_argument("psi_hat: m must be >= 1");
    if (!rs.has_gradients()) throw std::invalid_argument("psi_hat: gradients not populated");
    const auto n = static_cast<Eigen::Index>(rs.n());
    if (m >= n) throw std::invalid_argument("psi_hat: m must be < n");
    const int k0 = static_cast<int>(rs.gradients.cols());
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(m, k0);
    for (int h = 1; h <= m; ++h) {
        for (Eigen::Index t = h; t < n; ++t)
            psi.row(h - 1) += rs.residuals[static_cast<std::size_t>(t - h)] * rs.gradients.row(t);
    }
    return psi / static_cast<double>(n);
}

inline UhatSeries u_hat(const ResidualSet& rs, const Eigen::MatrixXd& j_hat, int m) {
    if (!rs.has_gradients()) throw std::invalid_argument("u_hat: gradients not populated");
    if (m < 0) throw std::invalid_argument("u_hat: m must be >= 0");
    const auto n = static_cast<Eigen::Index>(rs.n());
    const int k0 = static_cast<int>(rs.gradients.cols());
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j_hat);
    if (!lu.isInvertible())
        throw std::runtime_error("u_hat: singular J_hat (under-identified fit)");
    const Eigen::MatrixXd j_inv = lu.inverse();

    UhatSeries u;
    u.n_model_params = k0;
    u.m = m;
    u.values.resize(n, k0 + m);
    Eigen::MatrixXd scaled = rs.gradients;  // rows e_t * g_t
    for (Eigen::Index t = 0; t < n; ++t)
        scaled.row(t) *= rs.residuals[static_cast<std::size_t>(t)];
    u.values.leftCols(k0) = -2.0 * scaled * j_inv.transpose();
    for (int h = 1; h <= m; ++h) {
        for (Eigen::Index t = 0; t < n; ++t)
            u.values(t, k0 + h - 1) =
                t >= h ? rs.residuals[static_cast<std::size_t>(t)] *
                             rs.residuals[static_cast<std::size_t>(t - h)]
                       : 0.0;
    }
    return u;
}

struct SpectralXi {
    Eigen::MatrixXd xi;  // symmetrized spectral estimate of Xi
    int r_used = 0;
};

namespace detail {

/// VAR(r) least squares on mean-corrected rows, returning Delta(1) and the
/// residual covariance. Rows t = first_row..n-1 are used as regressands.
struct VarFit {
    Eigen::MatrixXd delta1;   // I - sum Delta_k
    Eigen::MatrixXd sigma_v;  // residual covariance
    double log_det_sigma = 0.0;
};

inline VarFit var_ls(const Eigen::MatrixXd& u, int r, int first_row) {
    const Eigen::Index n = u.rows();
    const Eigen::Index k = u.cols();
    const Eigen::Index rows = n - first_row;
    if (rows < static_cast<Eigen::Index>(k) * r + 1)
        throw std::runtime_error("var_ls: not enough rows for the requested order");
    Eigen::MatrixXd Z(rows, k * r);
    for (int i = 1; i <= r; ++i)
        Z.middleCols((i - 1) * k, k) = u.middleRows(first_row - i, rows);
    const Eigen::MatrixXd Y = u.bottomRows(rows);
    const Eigen::MatrixXd G = Z.transpose() * Z;
    const Eigen::MatrixXd B = Z.transpose() * Y;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("var_ls: rank-deficient regression (r too large)");
    const Eigen::MatrixXd coef = ldlt.solve(B);  // (k*r) x k
    VarFit out;
    out.delta1 = Eigen::MatrixXd::Identity(k, k);
    for (int i = 0; i < r; ++i) out.delta1 -= coef.middleRows(i * k, k).transpose();
    const Eigen::MatrixXd V = Y - Z * coef;
    out.sigma_v = V.transpose() * V / static_cast<double>(rows);
    Eigen::LDLT<Eigen::MatrixXd> sv(out.sigma_v);
    double ld = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) ld += std::log(std::max(sv.vectorD()(i), 1e-300));
    out.log_det_sigma = ld;
    return out;
}

}  // namespace detail

/**
 * @brief Autoregressive spectral estimator of Xi.
 *
 * Fits a VAR(r) to the mean-corrected U_hat rows and evaluates
 * Delta_r(1)^{-1} Sigma_v Delta_r(1)'^{-1}. With r < 0 the order is chosen by
 * BIC over 1..floor(n^{1/5}) on a common sample, keeping r^5 <= n.
 */
inline SpectralXi spectral_ar_xi(const Eigen::MatrixXd& u_rows, int r = -1) {
    const Eigen::Index n = u_rows.rows();
    const Eigen::Index k = u_rows.cols();
    if (n < 20) throw std::invalid_argument("spectral_ar_xi: series too short");
    Eigen::MatrixXd u = u_rows.rowwise() - u_rows.colwise().mean();

    int r_used = r;
    if (r < 0) {
        const int r_max = std::max(1, static_cast<int>(std::floor(std::pow(double(n), 0.2))));
        double best = std::numeric_limits<double>::infinity();
        r_used = 1;
        for (int rr = 1; rr <= r_max; ++rr) {
            if (static_cast<Eigen::Index>(10) * rr * k >= n) break;
            detail::VarFit f = detail::var_ls(u, rr, r_max);
            const double rows = static_cast<double>(n - r_max);
            const double bic =
                f.log_det_sigma + static_cast<double>(rr) * k * k * std::log(rows) / rows;
            if (bic < best) {
                best = bic;
                r_used = rr;
            }
        }
    } else if (r < 1) {
        throw std::invalid_argument("spectral_ar_xi: r must be >= 1 (or negative for auto)");
    }
    if (static_cast<Eigen::Index>(10) * r_used * k >= n)
        throw std::invalid_argument("spectral_ar_xi: n too small for r*(p+q+1+m)");

    detail::VarFit f = detail::var_ls(u, r_used, r_used);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(f.delta1);
    if (!lu.isInvertible()) throw std::runtime_error("spectral_ar_xi: Delta_r(1) is singular");
    const Eigen::MatrixXd dinv = lu.inverse();
    Eigen::MatrixXd xi = dinv * f.sigma_v * dinv.transpose();
    SpectralXi out;
    out.xi = 0.5 * (xi + xi.transpose());
    out.r_used = r_used;
    return out;
}

/**
 * @brief Estimated covariance of the residual autocorrelation vector.
 *
 * sigma_gamma = Gamma_mm + Psi Sigma_theta Psi' + Psi Sigma_theta_gamma +
 * (Psi Sigma_theta_gamma)', with the blocks cut from xi_hat, and
 * sigma_rho = sigma_gamma / sigma2^2. Eigenvalues are clipped at zero and
 * sorted descending; `clipped` records the largest magnitude removed.
 */
struct RhoCovariance {
    Eigen::MatrixXd psi_hat;
    Eigen::MatrixXd xi_hat;
    Eigen::MatrixXd sigma_gamma;
    Eigen::MatrixXd sigma_rho;
    std::vector<double> eigenvalues;  // descending, clipped at 0
    int ar_order = 0;
    double clipped = 0.0;
};

inline RhoCovariance assemble_sigma_rho(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& xi,
                                        double sigma2_hat, int m, int ar_order = 0) {
    const int k0 = static_cast<int>(psi.cols());
    if (psi.rows() != m) throw std::invalid_argument("assemble_sigma_rho: psi has wrong rows");
    if (xi.rows() != k0 + m || xi.cols() != k0 + m)
        throw std::invalid_argument("assemble_sigma_rho: xi block dimensions inconsistent");
    if (!xi.allFinite() || !psi.allFinite())
        throw std::invalid_argument("assemble_sigma_rho: non-finite entries");
    const Eigen::MatrixXd sigma_theta = xi.topLeftCorner(k0, k0);
    const Eigen::MatrixXd sigma_theta_gamma = xi.topRightCorner(k0, m);
    const Eigen::MatrixXd gamma_mm = xi.bottomRightCorner(m, m);
    const Eigen::MatrixXd cross = psi * sigma_theta_gamma;
    RhoCovariance out;
    out.psi_hat = psi;
    out.xi_hat = xi;
    out.ar_order = ar_order;
    out.sigma_gamma = gamma_mm + psi * sigma_theta * psi.transpose() + cross + cross.transpose();
    out.sigma_rho = out.sigma_gamma / (sigma2_hat * sigma2_hat);
    const Eigen::MatrixXd sym = 0.5 * (out.sigma_rho + out.sigma_rho.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("assemble_sigma_rho: eigen decomposition failed");
    out.eigenvalues.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double ev = es.eigenvalues()(m - 1 - i);  // descending
        out.eigenvalues[static_cast<std::size_t>(i)] = std::max(ev, 0.0);
        if (ev < 0.0) out.clipped = std::max(out.clipped, -ev);
    }
    return out;
}

/// Strong-case reduction: Sigma_rho^S = I_m - (2/sigma2) Psi J^{-1} Psi'.
inline Eigen::MatrixXd strong_sigma_rho(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& j_hat,
                                        double sigma2_hat, int m) {
    if (psi.rows() != m) throw std::invalid_argument("strong_sigma_rho: psi has wrong rows");
    Eigen::FullPivLU<Eigen::MatrixXd> lu(j_hat);
    if (!lu.isInvertible()) throw std::runtime_error("strong_sigma_rho: singular J_hat");
    return Eigen::MatrixXd::Identity(m, m) -
           2.0 / sigma2_hat * psi * lu.inverse() * psi.transpose();
}

}  // namespace farima
