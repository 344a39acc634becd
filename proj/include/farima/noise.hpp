#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "farima/rng.hpp"

namespace farima {

enum class NoiseFamily { iid_gaussian, garch11, eta_product };

/**
 * @brief Innovation generator specification.
 *
 * garch11 draws eps_t = sigma_t eta_t with
 * sigma_t^2 = omega + alpha1 eps_{t-1}^2 + beta1 sigma_{t-1}^2;
 * eta_product draws the weak white noise eps_t = eta_t^2 eta_{t-1}.
 * eta is always iid N(0,1), so the GARCH kurtosis parameter kappa is 3.
 */
struct NoiseSpec {
    NoiseFamily family = NoiseFamily::iid_gaussian;
    double omega = 1.0;
    double alpha1 = 0.0;
    double beta1 = 0.0;
    std::uint64_t seed = 0;
};

inline constexpr double kGaussKurtosis = 3.0;  // E eta^4 for Gaussian eta

/// Second-order structure of the squared GARCH process.
struct Garch2ndOrder {
    double kappa;   // E eta^4
    double sigma2;  // Var eps
    double gamma0;  // Var eps^2
    double gamma1;  // lag-1 autocovariance of eps^2
};

/// Fourth-moment existence for garch11 with Gaussian eta:
/// 3 alpha1^2 + beta1^2 + 2 alpha1 beta1 < 1.
inline bool garch_fourth_moment_check(const NoiseSpec& spec) {
    if (spec.family != NoiseFamily::garch11)
        throw std::invalid_argument("garch_fourth_moment_check: spec is not garch11");
    const double a = spec.alpha1, b = spec.beta1;
    return kGaussKurtosis * a * a + b * b + 2.0 * a * b < 1.0;
}

inline Garch2ndOrder garch_second_order(const NoiseSpec& spec) {
    if (spec.family != NoiseFamily::garch11)
        throw std::invalid_argument("garch_second_order: spec is not garch11");
    if (spec.omega <= 0.0) throw std::invalid_argument("garch_second_order: omega must be > 0");
    if (!garch_fourth_moment_check(spec))
        throw std::domain_error("garch_second_order: fourth-moment condition violated");
    const double a = spec.alpha1, b = spec.beta1, k = kGaussKurtosis;
    const double s2 = spec.omega / (1.0 - a - b);
    const double denom = 1.0 - b * b - 2.0 * a * b - a * a * k;
    Garch2ndOrder out;
    out.kappa = k;
    out.sigma2 = s2;
    out.gamma1 = (k - 1.0) * (a - a * b * b - a * a * b) / denom * s2 * s2;
    out.gamma0 = (k - 1.0) * (1.0 - b * b - 2.0 * a * b) / denom * s2 * s2;
    return out;
}

/// Autocovariance of the squared GARCH process at the given lag:
/// gamma(0) = Var eps^2, gamma(l) = gamma(1) (alpha1+beta1)^{l-1} for l >= 1.
inline double garch_sq_autocov(const NoiseSpec& spec, std::size_t lag) {
    const Garch2ndOrder g = garch_second_order(spec);
    if (lag == 0) return g.gamma0;
    return g.gamma1 * std::pow(spec.alpha1 + spec.beta1, static_cast<double>(lag - 1));
}

/**
 * @brief Draw n innovations, discarding burn_in initial values.
 *
 * The GARCH recursion starts at the unconditional variance when
 * alpha1 + beta1 < 1, at omega otherwise.
 */
inline std::vector<double> generate(const NoiseSpec& spec, std::size_t n, std::size_t burn_in) {
    if (n == 0) throw std::invalid_argument("generate: n must be >= 1");
    Rng rng(spec.seed);
    const std::size_t total = n + burn_in;
    std::vector<double> out(total);
    switch (spec.family) {
        case NoiseFamily::iid_gaussian:
            for (auto& v : out) v = rng.gaussian();
            break;
        case NoiseFamily::garch11: {
            if (spec.omega <= 0.0) throw std::invalid_argument("generate: garch11 needs omega > 0");
            if (spec.alpha1 < 0.0 || spec.beta1 < 0.0)
                throw std::invalid_argument("generate: garch11 needs alpha1, beta1 >= 0");
            const double ab = spec.alpha1 + spec.beta1;
            double sig2 = ab < 1.0 ? spec.omega / (1.0 - ab) : spec.omega;
            for (std::size_t t = 0; t < total; ++t) {
                if (t > 0)
                    sig2 = spec.omega + spec.alpha1 * out[t - 1] * out[t - 1] + spec.beta1 * sig2;
                out[t] = std::sqrt(sig2) * rng.gaussian();
            }
            break;
        }
        case NoiseFamily::eta_product: {
            double eta_prev = rng.gaussian();
            for (std::size_t t = 0; t < total; ++t) {
                const double eta = rng.gaussian();
                out[t] = eta * eta * eta_prev;
                eta_prev = eta;
            }
            break;
        }
    }
    out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(burn_in));
    return out;
}

}  // namespace farima
