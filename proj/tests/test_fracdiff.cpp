#include <catch2/catch.hpp>
#include <cmath>

#include "farima/fracdiff.hpp"

using farima::CoeffSeq;

TEST_CASE("fractional coefficients: small-order values", "[fracdiff]") {
    CHECK(farima::frac_diff_coeffs(0.2, 1) == CoeffSeq{1.0});

    const CoeffSeq id = farima::frac_diff_coeffs(0.0, 4);
    CHECK(id == CoeffSeq{1.0, 0.0, 0.0, 0.0});

    const CoeffSeq a = farima::frac_diff_coeffs(0.2, 3);
    CHECK(a[0] == Approx(1.0));
    CHECK(a[1] == Approx(-0.2));
    CHECK(a[2] == Approx(-0.08));
}

TEST_CASE("alpha_1 equals -d exactly", "[fracdiff]") {
    for (double d : {-0.45, -0.2, 0.1, 0.3, 0.49}) {
        const CoeffSeq a = farima::frac_diff_coeffs(d, 2);
        CHECK(a[1] == -d);
    }
}

TEST_CASE("recursion matches the log-gamma ratio to 1e-12 relative", "[fracdiff]") {
    for (double d : {-0.49, -0.2, -0.05, 0.05, 0.2, 0.49}) {
        const CoeffSeq a = farima::frac_diff_coeffs(d, 1001);
        for (int j = 1; j <= 1000; ++j) {
            // log-gamma oracle: alpha_j = Gamma(j-d) (-d) / {Gamma(j+1) Gamma(1-d)}
            // using Gamma(-d) = Gamma(1-d)/(-d); evaluated in long double since
            // double lgamma carries ~2e-12 of its own noise at j ~ 1000
            const long double ld = static_cast<long double>(d);
            const double oracle = static_cast<double>(
                expl(lgammal(j - ld) - lgammal(j + 1.0L) - lgammal(1.0L - ld) +
                     logl(fabsl(ld))) *
                (d > 0 ? -1.0L : 1.0L));
            REQUIRE(a[static_cast<std::size_t>(j)] ==
                    Approx(oracle).epsilon(1e-12).margin(1e-300));
        }
    }
}

TEST_CASE("Stirling asymptotics at j = 500", "[fracdiff]") {
    const double d = 0.3;
    const CoeffSeq a = farima::frac_diff_coeffs(d, 501);
    const double j = 500.0;
    // Gamma(-d) = Gamma(1-d)/(-d)
    const double gamma_minus_d = std::tgamma(1.0 - d) / (-d);
    const double stirling = std::pow(j, -d - 1.0) / gamma_minus_d;
    CHECK(a[500] == Approx(stirling).epsilon(0.02));
}

TEST_CASE("coefficients negative and summing to -1 for 0 < d < 1/2", "[fracdiff]") {
    for (double d : {0.05, 0.2, 0.45}) {
        const CoeffSeq a = farima::frac_diff_coeffs(d, 200000);
        double tail_sum = 0.0;
        for (std::size_t j = 1; j < a.size(); ++j) {
            REQUIRE(a[j] < 0.0);
            tail_sum += a[j];
        }
        // partial sums approach -1 from above at rate j^{-d}
        CHECK(tail_sum == Approx(-1.0).margin(std::pow(200000.0, -d) * 2.0));
    }
}

TEST_CASE("frac_diff_coeffs input validation", "[fracdiff]") {
    CHECK_THROWS_AS(farima::frac_diff_coeffs(1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(farima::frac_diff_coeffs(std::nan(""), 4), std::invalid_argument);
    CHECK_THROWS_AS(farima::frac_diff_coeffs(0.2, 0), std::invalid_argument);
}

TEST_CASE("convolution basics", "[fracdiff]") {
    CHECK(farima::convolve({1, 2}, {1, 0, 0}, 3) == CoeffSeq{1, 2, 0});
    CHECK(farima::convolve({1, 1}, {1, 1}, 3) == CoeffSeq{1, 2, 1});
    CHECK_THROWS_AS(farima::convolve({1}, {1}, 0), std::invalid_argument);
}

TEST_CASE("(1-z)^d (1-z)^-d is the identity series", "[fracdiff]") {
    for (double d : {-0.45, -0.2, -0.05, 0.05, 0.2, 0.45}) {
        const CoeffSeq prod = farima::convolve(farima::frac_diff_coeffs(d, 256),
                                               farima::frac_diff_coeffs(-d, 256), 256);
        CHECK(prod[0] == Approx(1.0).epsilon(1e-14));
        for (std::size_t j = 1; j < prod.size(); ++j)
            REQUIRE(std::abs(prod[j]) < 1e-10);
    }
}

TEST_CASE("poly_inverse geometric series", "[fracdiff]") {
    const CoeffSeq q = farima::poly_inverse({1.0, -0.5}, 4);
    CHECK(q[0] == Approx(1.0));
    CHECK(q[1] == Approx(0.5));
    CHECK(q[2] == Approx(0.25));
    CHECK(q[3] == Approx(0.125));

    CHECK(farima::poly_inverse({1.0}, 3) == CoeffSeq{1, 0, 0});
    CHECK_THROWS_AS(farima::poly_inverse({2.0, 1.0}, 3), std::invalid_argument);
}

TEST_CASE("poly_inverse re-multiplication oracle", "[fracdiff]") {
    const CoeffSeq p{1.0, -0.9};
    const CoeffSeq q = farima::poly_inverse(p, 200);
    const CoeffSeq prod = farima::convolve(p, q, 200);
    CHECK(prod[0] == Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 1; j < prod.size(); ++j) REQUIRE(std::abs(prod[j]) < 1e-12);
}

TEST_CASE("ma/ar infinity weights", "[fracdiff]") {
    farima::FarimaParams white;  // p = q = 0, d = 0
    CHECK(farima::ma_infinity_coeffs(white, 5) == CoeffSeq{1, 0, 0, 0, 0});
    CHECK(farima::ar_infinity_coeffs(white, 5) == CoeffSeq{1, 0, 0, 0, 0});

    farima::FarimaParams pure_d;
    pure_d.d = 0.2;
    const CoeffSeq gamma = farima::ar_infinity_coeffs(pure_d, 64);
    const CoeffSeq alpha = farima::frac_diff_coeffs(0.2, 64);
    for (std::size_t j = 0; j < 64; ++j) REQUIRE(gamma[j] == Approx(alpha[j]).margin(1e-15));
}

TEST_CASE("gamma(theta) and eta(theta) are mutual inverses", "[fracdiff]") {
    farima::FarimaParams theta;
    theta.ar = {0.5};
    theta.ma = {0.3};
    theta.d = 0.25;
    const CoeffSeq g = farima::ar_infinity_coeffs(theta, 256);
    const CoeffSeq e = farima::ma_infinity_coeffs(theta, 256);
    CHECK(g[0] == Approx(1.0));
    CHECK(e[0] == Approx(1.0));
    const CoeffSeq prod = farima::convolve(g, e, 256);
    CHECK(prod[0] == Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 1; j < prod.size(); ++j) REQUIRE(std::abs(prod[j]) < 1e-10);
}

TEST_CASE("eta decay exponent close to d - 1", "[fracdiff]") {
    farima::FarimaParams theta;
    theta.ar = {0.4};
    theta.ma = {-0.2};
    theta.d = 0.3;
    const CoeffSeq eta = farima::ma_infinity_coeffs(theta, 2001);
    // log-log slope over j in [100, 2000]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int j = 100; j <= 2000; ++j) {
        const double v = std::abs(eta[static_cast<std::size_t>(j)]);
        if (v <= 0.0) continue;
        const double lx = std::log(static_cast<double>(j)), ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++cnt;
    }
    const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    CHECK(slope == Approx(theta.d - 1.0).margin(0.15));
}
