#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace farima {

/**
 * @brief FARIMA(p,d,q) parameter vector theta = (ar, ma, d).
 *
 * The lag polynomials are a(z) = 1 - sum_i ar[i-1] z^i and
 * b(z) = 1 - sum_j ma[j-1] z^j. Admissibility requires d inside the
 * configured interval of (-1/2,1/2) and every root of a and b to have
 * modulus >= 1 + delta.
 */
struct FarimaParams {
    std::vector<double> ar;
    std::vector<double> ma;
    double d = 0.0;

    [[nodiscard]] int p() const { return static_cast<int>(ar.size()); }
    [[nodiscard]] int q() const { return static_cast<int>(ma.size()); }
    [[nodiscard]] int dim() const { return p() + q() + 1; }

    /// Packed vector in the (ar, ma, d) ordering used everywhere.
    [[nodiscard]] std::vector<double> packed() const {
        std::vector<double> v;
        v.reserve(static_cast<std::size_t>(dim()));
        v.insert(v.end(), ar.begin(), ar.end());
        v.insert(v.end(), ma.begin(), ma.end());
        v.push_back(d);
        return v;
    }

    static FarimaParams from_packed(const std::vector<double>& v, int p, int q) {
        if (static_cast<int>(v.size()) != p + q + 1)
            throw std::invalid_argument("from_packed: size mismatch");
        FarimaParams th;
        th.ar.assign(v.begin(), v.begin() + p);
        th.ma.assign(v.begin() + p, v.begin() + p + q);
        th.d = v.back();
        return th;
    }
};

struct AdmissibilityPolicy {
    double d_min = -0.49;
    double d_max = 0.49;
    double delta = 0.01;  // root modulus margin for Theta_delta
};

namespace detail {

/// All complex roots of 1 - taps[0] z - taps[1] z^2 - ... (Durand-Kerner).
/// Trailing zero taps are stripped first.
inline std::vector<std::complex<double>> poly_roots(std::vector<double> taps) {
    while (!taps.empty() && taps.back() == 0.0) taps.pop_back();
    const std::size_t deg = taps.size();
    std::vector<std::complex<double>> roots;
    if (deg == 0) return roots;
    if (deg == 1) {
        roots.emplace_back(1.0 / taps[0], 0.0);
        return roots;
    }
    // monic form: z^deg + c_{deg-1} z^{deg-1} + ... + c_0, from
    // -taps[deg-1] z^deg - ... - taps[0] z + 1 = 0
    std::vector<std::complex<double>> c(deg);
    const double lead = -taps[deg - 1];
    c[0] = std::complex<double>(1.0 / lead, 0.0);
    for (std::size_t k = 1; k < deg; ++k) c[k] = std::complex<double>(-taps[k - 1] / lead, 0.0);
    roots.resize(deg);
    std::complex<double> seed(0.4, 0.9);
    std::complex<double> w(1.0, 0.0);
    for (std::size_t i = 0; i < deg; ++i) {
        roots[i] = w;
        w *= seed;
    }
    for (int iter = 0; iter < 200; ++iter) {
        double shift = 0.0;
        for (std::size_t i = 0; i < deg; ++i) {
            std::complex<double> num = 1.0;  // monic polynomial value at roots[i]
            for (std::size_t k = 0; k < deg; ++k) {
                num = num * roots[i] + c[deg - 1 - k];
            }
            std::complex<double> den = 1.0;
            for (std::size_t j = 0; j < deg; ++j)
                if (j != i) den *= (roots[i] - roots[j]);
            const std::complex<double> delta = num / den;
            roots[i] -= delta;
            shift = std::max(shift, std::abs(delta));
        }
        if (shift < 1e-13) break;
    }
    return roots;
}

/// Smallest root modulus of 1 - sum taps[i] z^{i+1}; +inf when taps vanish.
inline double min_root_modulus(const std::vector<double>& taps) {
    const auto roots = poly_roots(taps);
    double m = std::numeric_limits<double>::infinity();
    for (const auto& r : roots) m = std::min(m, std::abs(r));
    return m;
}

}  // namespace detail

[[nodiscard]] inline bool is_admissible(const FarimaParams& theta,
                                        const AdmissibilityPolicy& policy = {}) {
    if (!std::isfinite(theta.d) || theta.d < policy.d_min || theta.d > policy.d_max) return false;
    for (double v : theta.ar)
        if (!std::isfinite(v)) return false;
    for (double v : theta.ma)
        if (!std::isfinite(v)) return false;
    const double bound = 1.0 + policy.delta;
    if (!theta.ar.empty() && detail::min_root_modulus(theta.ar) < bound) return false;
    if (!theta.ma.empty() && detail::min_root_modulus(theta.ma) < bound) return false;
    return true;
}

inline void require_admissible(const FarimaParams& theta, const AdmissibilityPolicy& policy = {}) {
    if (!is_admissible(theta, policy))
        throw std::invalid_argument("FarimaParams outside the admissible set Theta_delta");
}

}  // namespace farima
