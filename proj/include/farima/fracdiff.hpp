#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "farima/fft.hpp"
#include "farima/params.hpp"

namespace farima {

/// Finite power-series coefficient sequence, indexed from 0.
using CoeffSeq = std::vector<double>;

/**
 * @brief Coefficients of the fractional difference operator (1-L)^d.
 *
 * alpha_0 = 1 and alpha_j = alpha_{j-1} (j-1-d)/j, the stable multiplicative
 * form of Gamma(j-d)/{Gamma(j+1)Gamma(-d)}.
 */
inline CoeffSeq frac_diff_coeffs(double d, std::size_t n_terms) {
    if (!std::isfinite(d) || std::abs(d) >= 1.0)
        throw std::invalid_argument("frac_diff_coeffs: d must be finite with |d| < 1");
    if (n_terms == 0) throw std::invalid_argument("frac_diff_coeffs: n_terms must be >= 1");
    CoeffSeq a(n_terms);
    a[0] = 1.0;
    for (std::size_t j = 1; j < n_terms; ++j)
        a[j] = a[j - 1] * (static_cast<double>(j) - 1.0 - d) / static_cast<double>(j);
    return a;
}

/// d-derivatives of the fractional coefficients, by the same recursion shape:
/// da_0 = 0, da_j = da_{j-1} (j-1-d)/j - a_{j-1}/j.
inline CoeffSeq frac_diff_coeffs_deriv(double d, std::size_t n_terms) {
    if (!std::isfinite(d) || std::abs(d) >= 1.0)
        throw std::invalid_argument("frac_diff_coeffs_deriv: d must be finite with |d| < 1");
    if (n_terms == 0) throw std::invalid_argument("frac_diff_coeffs_deriv: n_terms must be >= 1");
    CoeffSeq a(n_terms), da(n_terms);
    a[0] = 1.0;
    da[0] = 0.0;
    for (std::size_t j = 1; j < n_terms; ++j) {
        const double jd = static_cast<double>(j);
        a[j] = a[j - 1] * (jd - 1.0 - d) / jd;
        da[j] = da[j - 1] * (jd - 1.0 - d) / jd - a[j - 1] / jd;
    }
    return da;
}

/// First n_terms coefficients of the Cauchy product of two power series.
inline CoeffSeq convolve(const CoeffSeq& a, const CoeffSeq& b, std::size_t n_terms) {
    if (a.empty() || b.empty()) throw std::invalid_argument("convolve: empty input");
    if (n_terms == 0) throw std::invalid_argument("convolve: n_terms must be >= 1");
    // small second factor: direct accumulation is exact and fast
    if (b.size() <= 8 || a.size() <= 8) {
        const CoeffSeq& small = b.size() <= a.size() ? b : a;
        const CoeffSeq& big = b.size() <= a.size() ? a : b;
        CoeffSeq c(n_terms, 0.0);
        for (std::size_t i = 0; i < n_terms; ++i) {
            double s = 0.0;
            const std::size_t kmax = i < small.size() - 1 ? i : small.size() - 1;
            for (std::size_t k = 0; k <= kmax; ++k)
                if (i - k < big.size()) s += small[k] * big[i - k];
            c[i] = s;
        }
        return c;
    }
    CoeffSeq bx(b);
    bx.resize(n_terms, 0.0);
    CoeffSeq c = detail::causal_convolve(a, bx);
    c.resize(n_terms, 0.0);
    return c;
}

/// Power-series inverse of p with p[0] = 1: convolve(p, result) is the delta
/// sequence through n_terms coefficients.
inline CoeffSeq poly_inverse(const CoeffSeq& p, std::size_t n_terms) {
    if (p.empty() || p[0] != 1.0)
        throw std::invalid_argument("poly_inverse: leading coefficient must be exactly 1");
    if (n_terms == 0) throw std::invalid_argument("poly_inverse: n_terms must be >= 1");
    CoeffSeq q(n_terms, 0.0);
    q[0] = 1.0;
    const std::size_t np = p.size();
    for (std::size_t i = 1; i < n_terms; ++i) {
        double s = 0.0;
        const std::size_t kmax = i < np - 1 ? i : np - 1;
        for (std::size_t k = 1; k <= kmax; ++k) s += p[k] * q[i - k];
        q[i] = -s;
    }
    return q;
}

namespace detail {

/// (1, -v_1, ..., -v_k): coefficient packing of 1 - sum v_i z^i.
inline CoeffSeq pack_lag_poly(const std::vector<double>& v) {
    CoeffSeq p(v.size() + 1);
    p[0] = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i) p[i + 1] = -v[i];
    return p;
}

}  // namespace detail

/// MA(infinity) weights eta(theta): coefficients of (1-z)^{-d} a^{-1}(z) b(z).
inline CoeffSeq ma_infinity_coeffs(const FarimaParams& theta, std::size_t n_terms,
                                   const AdmissibilityPolicy& policy = {}) {
    require_admissible(theta, policy);
    const CoeffSeq a_inv = poly_inverse(detail::pack_lag_poly(theta.ar), n_terms);
    const CoeffSeq ab = convolve(a_inv, detail::pack_lag_poly(theta.ma), n_terms);
    return convolve(frac_diff_coeffs(-theta.d, n_terms), ab, n_terms);
}

/// AR(infinity) weights gamma(theta): coefficients of b^{-1}(z) a(z) (1-z)^{d}.
inline CoeffSeq ar_infinity_coeffs(const FarimaParams& theta, std::size_t n_terms,
                                   const AdmissibilityPolicy& policy = {}) {
    require_admissible(theta, policy);
    const CoeffSeq b_inv = poly_inverse(detail::pack_lag_poly(theta.ma), n_terms);
    const CoeffSeq ba = convolve(b_inv, detail::pack_lag_poly(theta.ar), n_terms);
    return convolve(ba, frac_diff_coeffs(theta.d, n_terms), n_terms);
}

}  // namespace farima
