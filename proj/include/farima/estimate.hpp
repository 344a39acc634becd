#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "farima/model.hpp"
#include "farima/params.hpp"

namespace farima {

struct FitOptions {
    double d_min = -0.49;
    double d_max = 0.49;
    double delta = 0.01;     // root-modulus margin
    double grad_tol = 1e-5;  // infinity norm of the projected gradient
    int max_iterations = 500;
};

/**
 * @brief Least squares fit result.
 *
 * objective is Q_n(theta_hat), the mean of squared truncated residuals, which
 * coincides with sigma2_hat = gamma_hat(0).
 */
struct FitResult {
    FarimaParams theta_hat;
    double sigma2_hat = 0.0;
    double objective = 0.0;
    Eigen::MatrixXd j_hat;
    ResidualSet residual_set;
    bool converged = false;
    int iterations = 0;
};

/// J_hat = (2/n) sum_t g_t g_t' from the gradient rows of a ResidualSet.
inline Eigen::MatrixXd j_matrix(const ResidualSet& rs) {
    if (!rs.has_gradients()) throw std::invalid_argument("j_matrix: gradients not populated");
    const auto n = static_cast<double>(rs.n());
    if (rs.n() == 0) throw std::invalid_argument("j_matrix: empty residual set");
    return 2.0 / n * (rs.gradients.transpose() * rs.gradients);
}

namespace detail {

struct LsObjective {
    std::span<const double> x;
    int p, q;
    AdmissibilityPolicy policy;

    // Q_n and its analytic gradient; +inf outside Theta_delta.
    double value(const std::vector<double>& v) const {
        const FarimaParams th = FarimaParams::from_packed(v, p, q);
        if (!is_admissible(th, policy)) return std::numeric_limits<double>::infinity();
        const ResidualSet rs = residuals(th, x, policy);
        double s = 0.0;
        for (double e : rs.residuals) s += e * e;
        return s / static_cast<double>(rs.n());
    }

    double value_grad(const std::vector<double>& v, Eigen::VectorXd& grad) const {
        const FarimaParams th = FarimaParams::from_packed(v, p, q);
        if (!is_admissible(th, policy)) return std::numeric_limits<double>::infinity();
        const ResidualSet rs = residual_gradients(th, x, policy);
        const auto n = static_cast<double>(rs.n());
        const Eigen::Map<const Eigen::VectorXd> eps(rs.residuals.data(),
                                                    static_cast<Eigen::Index>(rs.n()));
        grad = 2.0 / n * (rs.gradients.transpose() * eps);
        return eps.squaredNorm() / n;
    }
};

inline void project_box(std::vector<double>& v, const std::vector<double>& lo,
                        const std::vector<double>& hi) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
}

struct BfgsOutcome {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    bool converged = false;
    int iterations = 0;
};

/// Projected BFGS with backtracking line search on a box; admissibility
/// violations act as an infinite barrier that the line search backs away from.
inline BfgsOutcome projected_bfgs(const LsObjective& obj, std::vector<double> x,
                                  const std::vector<double>& lo, const std::vector<double>& hi,
                                  double grad_tol, int max_iter) {
    const int dim = static_cast<int>(x.size());
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd g(dim);
    double f = obj.value_grad(x, g);
    BfgsOutcome out;
    int it = 0;
    for (; it < max_iter; ++it) {
        // projected gradient stationarity on the box
        double pg_norm = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double step = std::clamp(x[i] - g(i), lo[i], hi[i]) - x[i];
            pg_norm = std::max(pg_norm, std::abs(step));
        }
        if (pg_norm <= grad_tol) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd dir = -H * g;
        if (dir.dot(g) > -1e-14 * dir.norm() * g.norm()) {
            H = Eigen::MatrixXd::Identity(dim, dim);
            dir = -g;
        }
        double t = 1.0;
        std::vector<double> xn(x);
        Eigen::VectorXd gn(dim);
        double fn = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (int i = 0; i < dim; ++i) xn[i] = x[i] + t * dir(i);
            project_box(xn, lo, hi);
            fn = obj.value_grad(xn, gn);
            double sg = 0.0;
            for (int i = 0; i < dim; ++i) sg += (xn[i] - x[i]) * g(i);
            if (std::isfinite(fn) && fn <= f + 1e-4 * sg) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // step collapsed; report non-convergence
        Eigen::VectorXd s(dim), y(dim);
        for (int i = 0; i < dim; ++i) s(i) = xn[i] - x[i];
        y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const Eigen::VectorXd Hy = H * y;
            const double yHy = y.dot(Hy);
            H += ((sy + yHy) / (sy * sy)) * (s * s.transpose()) -
                 (Hy * s.transpose() + s * Hy.transpose()) / sy;
        }
        x = xn;
        f = fn;
        g = gn;
    }
    out.x = x;
    out.f = f;
    out.iterations = it;
    return out;
}

}  // namespace detail

/**
 * @brief Least squares estimation of a FARIMA(p,d,q) model over Theta_delta.
 *
 * Projected quasi-Newton on (ar, ma, d) with the analytic gradient of
 * Q_n(theta) = n^{-1} sum_t eps_t^2(theta) and a deterministic 3-point
 * multi-start on d. Non-convergence is reported through `converged`, not
 * thrown.
 */
inline FitResult fit(std::span<const double> x, int p, int q, const FitOptions& opts = {}) {
    if (p < 0 || q < 0) throw std::invalid_argument("fit: negative order");
    const int dim = p + q + 1;
    if (static_cast<int>(x.size()) <= 10 * dim)
        throw std::invalid_argument("fit: series too short for the requested orders");
    if (!(opts.d_min < opts.d_max) || opts.d_min <= -0.5 || opts.d_max >= 0.5)
        throw std::invalid_argument("fit: d bounds must satisfy d_min < d_max inside (-1/2,1/2)");

    AdmissibilityPolicy policy{opts.d_min, opts.d_max, opts.delta};
    detail::LsObjective obj{x, p, q, policy};

    std::vector<double> lo(dim, -2.0), hi(dim, 2.0);
    lo[dim - 1] = opts.d_min;
    hi[dim - 1] = opts.d_max;
    // single-lag polynomials have a box-shaped admissible set; larger orders
    // rely on the root-modulus barrier alone
    if (p == 1) {
        hi[0] = 1.0 / (1.0 + opts.delta);
        lo[0] = -hi[0];
    }
    if (q == 1) {
        hi[p] = 1.0 / (1.0 + opts.delta);
        lo[p] = -hi[p];
    }

    const double span = opts.d_max - opts.d_min;
    const double d_starts[3] = {opts.d_min + 0.1 * span, opts.d_min + 0.5 * span,
                                opts.d_max - 0.1 * span};
    detail::BfgsOutcome best;
    for (double d0 : d_starts) {
        std::vector<double> x0(dim, 0.0);
        x0[dim - 1] = d0;
        detail::BfgsOutcome o =
            detail::projected_bfgs(obj, x0, lo, hi, opts.grad_tol, opts.max_iterations);
        if (o.f < best.f) best = o;
    }

    FitResult res;
    res.theta_hat = FarimaParams::from_packed(best.x, p, q);
    res.residual_set = residual_gradients(res.theta_hat, x, policy);
    double s = 0.0;
    for (double e : res.residual_set.residuals) s += e * e;
    res.objective = s / static_cast<double>(res.residual_set.n());
    res.sigma2_hat = res.objective;
    res.j_hat = j_matrix(res.residual_set);
    res.converged = best.converged;
    res.iterations = best.iterations;
    return res;
}

}  // namespace farima
