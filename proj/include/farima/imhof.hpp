#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "farima/distributions.hpp"

namespace farima {

namespace detail {

// 7-point Gauss / 15-point Kronrod nodes and weights on [-1,1].
inline constexpr double kKronrodNodes[8] = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813};
inline constexpr double kKronrodWeights[8] = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529};
inline constexpr double kGaussWeights[4] = {0.417959183673469, 0.381830050505119,
                                            0.279705391489277, 0.129484966168870};

struct ImhofIntegrand {
    std::span<const double> xi;
    double x;

    double operator()(double u) const {
        double theta = -0.5 * x * u;
        double log_rho = 0.0;
        for (double w : xi) {
            const double wu = w * u;
            theta += 0.5 * std::atan(wu);
            log_rho += 0.25 * std::log1p(wu * wu);
        }
        return std::sin(theta) / (u * std::exp(log_rho));
    }

    /// Decreasing envelope 1/(u rho(u)) bounding |integrand|.
    double envelope(double u) const {
        double log_rho = 0.0;
        for (double w : xi) log_rho += 0.25 * std::log1p(w * u * w * u);
        return 1.0 / (u * std::exp(log_rho));
    }
};

template <typename F>
inline void gauss_kronrod(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double gauss = 0.0, kron = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double t = kKronrodNodes[i];
        const double f1 = f(c + h * t);
        const double sum = t == 0.0 ? f1 : f1 + f(c - h * t);
        kron += kKronrodWeights[i] * sum;
        if (i % 2 == 0) gauss += kGaussWeights[i / 2] * sum;
    }
    value = kron * h;
    err = std::abs((kron - gauss) * h);
}

}  // namespace detail

/**
 * @brief Tail probability P(sum_k xi_k Z_k^2 > x) for independent N(0,1) Z_k.
 *
 * Numerical inversion following Imhof: adaptive Gauss-Kronrod quadrature of
 * p = 1/2 + (1/pi) int_0^U sin(theta(u)) / (u rho(u)) du with
 * theta(u) = (1/2) sum arctan(xi_k u) - xu/2 and
 * rho(u) = prod (1 + xi_k^2 u^2)^{1/4}. The truncation point U comes from the
 * alternating-tail bound (one oscillation period times the envelope), so the
 * discarded tail is controlled even for one or two weights. Weights below
 * 1e-10 * max(xi) are dropped. Absolute accuracy target 1e-6; failure to meet
 * the budget raises, never silently degrades.
 */
inline double imhof_tail(std::span<const double> xi_in, double x, double abs_tol = 1e-6) {
    if (xi_in.empty()) throw std::invalid_argument("imhof_tail: empty weight vector");
    double max_xi = 0.0;
    for (double w : xi_in) {
        if (!(w >= 0.0)) throw std::invalid_argument("imhof_tail: negative or NaN weight");
        max_xi = std::max(max_xi, w);
    }
    if (max_xi == 0.0) throw std::invalid_argument("imhof_tail: all weights are zero");
    std::vector<double> xi;
    xi.reserve(xi_in.size());
    for (double w : xi_in)
        if (w > 1e-10 * max_xi) xi.push_back(w);
    if (x <= 0.0) return 1.0;

    const std::size_t K = xi.size();
    double min_xi = max_xi;
    for (double w : xi) min_xi = std::min(min_xi, w);

    // Z >= min_xi * chi2_K, so for tiny x the answer is pinned near 1 and the
    // oscillation-free integral cannot be truncated; use the bound instead.
    const double lower_p = chi2_cdf(x / min_xi, static_cast<double>(K));
    if (lower_p < 0.5 * abs_tol) return 1.0 - 0.5 * lower_p;

    const detail::ImhofIntegrand f{std::span<const double>(xi), x};
    const double pi = 3.14159265358979323846;

    // theta(u) decreases at asymptotic rate x/2, so successive sign changes of
    // the integrand are at most 2*pi/x apart and the discarded tail alternates.
    const double half_period = 2.0 * pi / x;
    const double tail_budget = 0.25 * abs_tol;
    double U = 1.0;
    while (half_period * f.envelope(U) > tail_budget && U < 4e12) U *= 1.5;

    struct Panel {
        double a, b, val, err;
    };
    std::vector<Panel> stack;
    auto make_panel = [&f](double a, double b) {
        Panel p{a, b, 0.0, 0.0};
        detail::gauss_kronrod(f, a, b, p.val, p.err);
        return p;
    };
    // seed panels no wider than one oscillation period
    const double width = std::min(U, half_period);
    for (double a = 0.0; a < U;) {
        const double b = std::min(U, a + width);
        stack.push_back(make_panel(a, b));
        a = b;
    }
    const double quad_budget = 0.5 * abs_tol * pi;  // in integral units
    double integral = 0.0, quad_err = 0.0;
    std::size_t evals_guard = 0;
    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        const double local_budget = quad_budget * (p.b - p.a) / U;
        if (p.err <= local_budget || p.b - p.a < 1e-13 * U || ++evals_guard > 2000000) {
            integral += p.val;
            quad_err += p.err;
            continue;
        }
        const double mid = 0.5 * (p.a + p.b);
        stack.push_back(make_panel(p.a, mid));
        stack.push_back(make_panel(mid, p.b));
    }
    const double trunc_err = half_period * f.envelope(U);
    if (quad_err / pi + trunc_err > abs_tol)
        throw std::runtime_error("imhof_tail: quadrature failed to meet the accuracy target");
    return std::clamp(0.5 + integral / pi, 0.0, 1.0);
}

}  // namespace farima
