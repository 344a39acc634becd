#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "farima/distributions.hpp"

namespace farima {

/**
 * @brief Inputs for the closed-form FARIMA(1,d,0) + GARCH(1,1) quantities.
 *
 * The FARIMA(0,d,1) twin is obtained by reinterpreting `a` as the moving
 * average coefficient; all formulas are identical under that relabeling.
 */
struct ClosedFormInputs {
    double a = 0.0;       // AR (or MA twin) coefficient, |a| < 1
    double omega = 1.0;   // GARCH intercept
    double alpha1 = 0.0;  // GARCH arch coefficient
    double beta1 = 0.0;   // GARCH garch coefficient
    double kappa = 3.0;   // E eta^4 (Gaussian)
    int m = 1;            // number of residual autocorrelations
};

namespace detail {

constexpr double kPi2Over6 = 1.6449340668482264;  // pi^2/6

/// ln(1-a)/a with its removable singularity at a = 0.
inline double log1m_over(double a) {
    if (std::abs(a) < 1e-8) return -1.0 - 0.5 * a - a * a / 3.0;
    return std::log1p(-a) / a;
}

/// Li2(z)/z with the z -> 0 limit equal to 1.
inline double dilog_over(double z) {
    if (std::abs(z) < 1e-8) return 1.0 + 0.25 * z + z * z / 9.0;
    return dilog(z) / z;
}

inline void check_inputs(const ClosedFormInputs& in) {
    if (!(std::abs(in.a) < 1.0)) throw std::invalid_argument("closed form: |a| < 1 required");
    if (in.m < 1) throw std::invalid_argument("closed form: m >= 1 required");
    if (in.alpha1 > 0.0 || in.beta1 > 0.0) {
        const double c4 = in.kappa * in.alpha1 * in.alpha1 + in.beta1 * in.beta1 +
                          2.0 * in.alpha1 * in.beta1;
        if (!(c4 < 1.0))
            throw std::domain_error("closed form: fourth-moment condition violated");
    }
}

/// gamma_{eps^2}(1)/sigma^4, the GARCH factor in every weak-noise display.
inline double garch_factor(const ClosedFormInputs& in) {
    if (in.alpha1 == 0.0) return 0.0;
    const double a1 = in.alpha1, b1 = in.beta1, k = in.kappa;
    return (k - 1.0) * (a1 - a1 * b1 * b1 - a1 * a1 * b1) /
           (1.0 - b1 * b1 - 2.0 * a1 * b1 - a1 * a1 * k);
}

}  // namespace detail

/// c(a) = pi^2 / {6(1-a^2)} - (ln(1-a)/a)^2, the J determinant factor.
inline double c_of_a(double a) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("c_of_a: |a| < 1 required");
    const double L = detail::log1m_over(a);
    return detail::kPi2Over6 / (1.0 - a * a) - L * L;
}

/// Closed-form J(theta0) and its inverse for FARIMA(1,d,0).
inline std::pair<Eigen::Matrix2d, Eigen::Matrix2d> j_and_inverse(double a, double sigma2) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("j_and_inverse: |a| < 1 required");
    const double L = detail::log1m_over(a);
    const double P = detail::kPi2Over6;
    const double Q = 1.0 / (1.0 - a * a);
    Eigen::Matrix2d J;
    J << Q, -L, -L, P;
    J *= 2.0 * sigma2;
    Eigen::Matrix2d Jinv;
    Jinv << P, L, L, Q;
    Jinv /= 2.0 * sigma2 * c_of_a(a);
    return {J, Jinv};
}

/// Closed-form I(theta0) = 2 sigma^2 J + 4 sigma^4 g * [GARCH block].
inline Eigen::Matrix2d i_matrix(const ClosedFormInputs& in, double sigma2) {
    detail::check_inputs(in);
    Eigen::Matrix2d I = 2.0 * sigma2 * j_and_inverse(in.a, sigma2).first;
    const double g = detail::garch_factor(in);
    if (g != 0.0) {
        const double ab = in.alpha1 + in.beta1;
        const double off = -detail::log1m_over(in.a * ab);  // -ln(1-a(a1+b1))/{a(a1+b1)}
        Eigen::Matrix2d W;
        W << 1.0 / (1.0 - in.a * in.a * ab), off, off, detail::dilog_over(ab);
        I += 4.0 * sigma2 * sigma2 * g * W;
    }
    return I;
}

/// Closed-form diagonal Gamma_{m,m} = sigma^4 (I + g diag(1, ab, ab^2, ...)).
inline Eigen::MatrixXd closed_gamma_mm(const ClosedFormInputs& in) {
    detail::check_inputs(in);
    const double s2 = in.omega / (1.0 - in.alpha1 - in.beta1);
    const double s4 = s2 * s2;
    const double g = detail::garch_factor(in);
    const double ab = in.alpha1 + in.beta1;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(in.m, in.m);
    double pw = 1.0;
    for (int i = 0; i < in.m; ++i) {
        G(i, i) = s4 * (1.0 + g * pw);
        pw *= ab;
    }
    return G;
}

struct ClosedSigmaRho {
    Eigen::MatrixXd matrix;
    std::vector<double> eigenvalues;  // descending
};

/**
 * @brief Closed-form asymptotic covariance of residual autocorrelations for
 * FARIMA(1,d,0) (or the FARIMA(0,d,1) twin) with GARCH(1,1) innovations.
 *
 * Strong part: Sigma^S(i,j) = 1_{i=j} - T(i,j)/c(a) with
 * T(i,j) = P a^{i+j-2} + Q/(ij) + L (a^{j-1}/i + a^{i-1}/j),
 * P = pi^2/6, Q = 1/(1-a^2), L = ln(1-a)/a. The weak correction adds
 * g [ ab^{i-1} 1_{i=j} + M(i,j)/c^2 - (ab^{i-1}+ab^{j-1}) T(i,j)/c ]
 * with the four-bracket M(i,j) built from the I-matrix blocks. The M term
 * carries 1/c^2, not 1/c: M(i,j) = w_i K w_j' where each w row absorbs one
 * J^{-1} and J^{-1} contributes a 1/c, so the Psi Sigma_theta Psi' block
 * yields two powers of 1/c. The defining identity is the block form
 * Gamma + Psi Sigma_theta Psi' + cross terms; tests pin both routes against
 * each other.
 */
inline ClosedSigmaRho closed_sigma_rho(const ClosedFormInputs& in) {
    detail::check_inputs(in);
    const int m = in.m;
    const double a = in.a;
    const double P = detail::kPi2Over6;
    const double L = detail::log1m_over(a);
    const double Q = 1.0 / (1.0 - a * a);
    const double c = c_of_a(a);
    const double g = detail::garch_factor(in);
    const double ab = in.alpha1 + in.beta1;

    auto apow = [&](int k) { return std::pow(a, k); };
    auto T = [&](int i, int j) {
        return P * apow(i + j - 2) + Q / (static_cast<double>(i) * j) +
               L * (apow(j - 1) / i + apow(i - 1) / j);
    };

    Eigen::MatrixXd S(m, m);
    for (int i = 1; i <= m; ++i)
        for (int j = 1; j <= m; ++j) S(i - 1, j - 1) = (i == j ? 1.0 : 0.0) - T(i, j) / c;

    if (g != 0.0) {
        const double LLp = detail::log1m_over(a * ab);  // ln(1-a(ab))/(a ab) packed form
        const double PP = 1.0 / (1.0 - a * a * ab);
        const double S2 = detail::dilog_over(ab);
        auto M = [&](int i, int j) {
            const double di = static_cast<double>(i), dj = static_cast<double>(j);
            return (L * PP - Q * LLp) * (P * apow(j - 1) / di + L / (di * dj)) +
                   (S2 * Q - L * LLp) * (L * apow(j - 1) / di + Q / (di * dj)) +
                   (P * PP - L * LLp) * (P * apow(i + j - 2) + L * apow(i - 1) / dj) +
                   (S2 * L - P * LLp) * (L * apow(i + j - 2) + Q * apow(i - 1) / dj);
        };
        std::vector<double> abp(static_cast<std::size_t>(m));
        double pw = 1.0;
        for (int i = 0; i < m; ++i) {
            abp[static_cast<std::size_t>(i)] = pw;
            pw *= ab;
        }
        for (int i = 1; i <= m; ++i)
            for (int j = 1; j <= m; ++j) {
                double w = M(i, j) / (c * c) -
                           (abp[static_cast<std::size_t>(i - 1)] +
                            abp[static_cast<std::size_t>(j - 1)]) *
                               T(i, j) / c;
                if (i == j) w += abp[static_cast<std::size_t>(i - 1)];
                S(i - 1, j - 1) += g * w;
            }
    }

    ClosedSigmaRho out;
    out.matrix = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(out.matrix);
    if (es.info() != Eigen::Success) throw std::runtime_error("closed_sigma_rho: eigen failed");
    out.eigenvalues.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        out.eigenvalues[static_cast<std::size_t>(i)] = es.eigenvalues()(m - 1 - i);
    return out;
}

}  // namespace farima
