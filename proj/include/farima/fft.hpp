#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace farima::detail {

/// In-place iterative radix-2 FFT. `n` must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_radix2: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    const double pi = 3.14159265358979323846;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv_n = 1.0 / static_cast<double>(n);
        for (auto& z : a) z *= inv_n;
    }
}

/// Causal truncated convolution: y[t] = sum_{j=0}^{t} c[j] x[t-j] for t < x.size().
/// Direct evaluation below a size cutoff, single packed complex FFT above it.
inline std::vector<double> causal_convolve(const std::vector<double>& c,
                                           const std::vector<double>& x) {
    const std::size_t n = x.size();
    const std::size_t nc = c.size() < n ? c.size() : n;
    std::vector<double> y(n, 0.0);
    if (n == 0) return y;
    constexpr std::size_t kDirectCutoff = 768;
    if (n <= kDirectCutoff) {
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            const std::size_t jmax = t < nc - 1 ? t : nc - 1;
            for (std::size_t j = 0; j <= jmax; ++j) s += c[j] * x[t - j];
            y[t] = s;
        }
        return y;
    }
    std::size_t fft_n = 1;
    while (fft_n < 2 * n) fft_n <<= 1;
    // pack c into the real part, x into the imaginary part
    std::vector<std::complex<double>> buf(fft_n, {0.0, 0.0});
    for (std::size_t j = 0; j < nc; ++j) buf[j].real(c[j]);
    for (std::size_t t = 0; t < n; ++t) buf[t].imag(x[t]);
    fft_radix2(buf, false);
    // separate the two spectra and multiply: C(w)X(w) for a packed transform
    std::vector<std::complex<double>> prod(fft_n);
    for (std::size_t k = 0; k < fft_n; ++k) {
        const std::size_t kc = (fft_n - k) & (fft_n - 1);
        const std::complex<double> fk = buf[k];
        const std::complex<double> fc = std::conj(buf[kc]);
        const std::complex<double> C = 0.5 * (fk + fc);
        const std::complex<double> X = std::complex<double>(0.0, -0.5) * (fk - fc);
        prod[k] = C * X;
    }
    fft_radix2(prod, true);
    for (std::size_t t = 0; t < n; ++t) y[t] = prod[t].real();
    return y;
}

}  // namespace farima::detail
