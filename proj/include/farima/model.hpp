#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "farima/fracdiff.hpp"
#include "farima/params.hpp"

namespace farima {

/// Truncated residuals and (optionally) their parameter gradients.
/// Gradient columns follow the (ar, ma, d) ordering of FarimaParams.
struct ResidualSet {
    std::vector<double> residuals;  // epsilon-tilde_t, t = 1..n
    Eigen::MatrixXd gradients;      // n x (p+q+1); 0x0 when not computed
    FarimaParams theta;

    [[nodiscard]] std::size_t n() const { return residuals.size(); }
    [[nodiscard]] bool has_gradients() const { return gradients.size() > 0; }
};

namespace detail {

/// u_t = (fractionally differenced, AR-tapped) series: F_t - sum_i ar_i F_{t-i},
/// where F is the running fractional-difference filter of x.
inline std::vector<double> ar_side(const std::vector<double>& filtered,
                                   const std::vector<double>& ar) {
    std::vector<double> u(filtered);
    const std::size_t n = u.size();
    for (std::size_t i = 1; i <= ar.size(); ++i) {
        const double th = ar[i - 1];
        for (std::size_t t = n; t-- > i;) u[t] -= th * filtered[t - i];
    }
    return u;
}

/// epsilon_t = u_t + sum_j ma_j epsilon_{t-j} (the inverted MA side of Eq-style
/// recursions with b(L) = 1 - sum ma_j L^j).
inline void ma_feedback(std::vector<double>& series, const std::vector<double>& ma) {
    const std::size_t q = ma.size();
    if (q == 0) return;
    const std::size_t n = series.size();
    for (std::size_t t = 0; t < n; ++t) {
        double s = series[t];
        for (std::size_t j = 1; j <= q && j <= t; ++j) s += ma[j - 1] * series[t - j];
        series[t] = s;
    }
}

}  // namespace detail

/**
 * @brief Truncated least squares residuals of a FARIMA(p,d,q) model.
 *
 * Implements the recursion with zero initial values (x_t = eps_t = 0 for
 * t <= 0): fractional filter, then AR taps, then MA feedback.
 */
inline ResidualSet residuals(const FarimaParams& theta, std::span<const double> x,
                             const AdmissibilityPolicy& policy = {}) {
    require_admissible(theta, policy);
    if (x.empty()) throw std::invalid_argument("residuals: empty series");
    const std::size_t n = x.size();
    const std::vector<double> xv(x.begin(), x.end());
    const CoeffSeq alpha = frac_diff_coeffs(theta.d, n);
    std::vector<double> eps = detail::ar_side(detail::causal_convolve(alpha, xv), theta.ar);
    detail::ma_feedback(eps, theta.ma);
    ResidualSet rs;
    rs.residuals = std::move(eps);
    rs.theta = theta;
    return rs;
}

/**
 * @brief Residuals together with analytic gradients d eps_t / d theta.
 *
 * AR column i:  -F_{t-i} + MA feedback;
 * MA column j:  eps_{t-j} + MA feedback;
 * d column:     the same recursion driven by the d-derivative coefficients.
 */
inline ResidualSet residual_gradients(const FarimaParams& theta, std::span<const double> x,
                                      const AdmissibilityPolicy& policy = {}) {
    require_admissible(theta, policy);
    if (x.empty()) throw std::invalid_argument("residual_gradients: empty series");
    const std::size_t n = x.size();
    const int p = theta.p();
    const int q = theta.q();
    const std::vector<double> xv(x.begin(), x.end());

    const std::vector<double> F = detail::causal_convolve(frac_diff_coeffs(theta.d, n), xv);
    const std::vector<double> G = detail::causal_convolve(frac_diff_coeffs_deriv(theta.d, n), xv);

    std::vector<double> eps = detail::ar_side(F, theta.ar);
    detail::ma_feedback(eps, theta.ma);

    Eigen::MatrixXd grads(n, p + q + 1);
    // AR columns
    for (int i = 1; i <= p; ++i) {
        std::vector<double> col(n, 0.0);
        for (std::size_t t = static_cast<std::size_t>(i); t < n; ++t) col[t] = -F[t - i];
        detail::ma_feedback(col, theta.ma);
        for (std::size_t t = 0; t < n; ++t) grads(t, i - 1) = col[t];
    }
    // MA columns
    for (int j = 1; j <= q; ++j) {
        std::vector<double> col(n, 0.0);
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) col[t] = eps[t - j];
        detail::ma_feedback(col, theta.ma);
        for (std::size_t t = 0; t < n; ++t) grads(t, p + j - 1) = col[t];
    }
    // d column
    {
        std::vector<double> col = detail::ar_side(G, theta.ar);
        detail::ma_feedback(col, theta.ma);
        for (std::size_t t = 0; t < n; ++t) grads(t, p + q) = col[t];
    }

    ResidualSet rs;
    rs.residuals = std::move(eps);
    rs.gradients = std::move(grads);
    rs.theta = theta;
    return rs;
}

/**
 * @brief Simulate a FARIMA path from given innovations.
 *
 * Applies the truncated MA(infinity) filter eta(theta), the exact inverse of
 * the residual recursion: residuals(theta, simulate(theta, eps, 0)) returns
 * eps to machine precision. The first `burn` values are discarded.
 */
inline std::vector<double> simulate(const FarimaParams& theta, std::span<const double> noise,
                                    std::size_t burn, const AdmissibilityPolicy& policy = {}) {
    require_admissible(theta, policy);
    if (noise.size() <= burn) throw std::invalid_argument("simulate: noise shorter than burn");
    const std::size_t total = noise.size();
    const CoeffSeq eta = ma_infinity_coeffs(theta, total, policy);
    const std::vector<double> nv(noise.begin(), noise.end());
    std::vector<double> x = detail::causal_convolve(eta, nv);
    x.erase(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(burn));
    return x;
}

}  // namespace farima
