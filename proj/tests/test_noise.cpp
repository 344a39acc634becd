#include <catch2/catch.hpp>
#include <cmath>
#include <numeric>

#include "farima/noise.hpp"

using farima::NoiseFamily;
using farima::NoiseSpec;

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double autocorr(const std::vector<double>& v, std::size_t lag) {
    const double m = mean(v);
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
        den += (v[t] - m) * (v[t] - m);
        if (t >= lag) num += (v[t] - m) * (v[t - lag] - m);
    }
    return num / den;
}

}  // namespace

TEST_CASE("iid gaussian moments", "[noise]") {
    NoiseSpec spec;
    spec.seed = 42;
    const auto x = farima::generate(spec, 100000, 0);
    const double n = 100000.0;
    CHECK(std::abs(mean(x)) < 3.0 / std::sqrt(n));
    CHECK(variance(x) > 0.97);
    CHECK(variance(x) < 1.03);
}

TEST_CASE("garch11 unconditional variance", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.4;
    spec.alpha1 = 0.3;
    spec.beta1 = 0.3;
    spec.seed = 7;
    const auto x = farima::generate(spec, 100000, 500);
    CHECK(variance(x) == Approx(1.0).epsilon(0.10));  // omega/(1-a1-b1) = 1
}

TEST_CASE("eta product is uncorrelated", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::eta_product;
    spec.seed = 11;
    const auto x = farima::generate(spec, 100000, 0);
    CHECK(std::abs(autocorr(x, 1)) < 3.0 / std::sqrt(100000.0));
}

TEST_CASE("all families pass white-noise bands at lags 1..5", "[noise]") {
    const double band = 4.0 / std::sqrt(100000.0);
    for (auto family : {NoiseFamily::iid_gaussian, NoiseFamily::garch11,
                        NoiseFamily::eta_product}) {
        NoiseSpec spec;
        spec.family = family;
        spec.omega = 0.4;
        spec.alpha1 = 0.3;
        spec.beta1 = 0.3;
        spec.seed = 1234;
        const auto x = farima::generate(spec, 100000, 500);
        CHECK(std::abs(mean(x)) < band * std::sqrt(variance(x)));
        for (std::size_t h = 1; h <= 5; ++h) REQUIRE(std::abs(autocorr(x, h)) < band);
    }
}

TEST_CASE("weak families have dependent squares", "[noise]") {
    for (auto family : {NoiseFamily::garch11, NoiseFamily::eta_product}) {
        NoiseSpec spec;
        spec.family = family;
        spec.omega = 0.4;
        spec.alpha1 = 0.3;
        spec.beta1 = 0.3;
        spec.seed = 5;
        auto x = farima::generate(spec, 100000, 500);
        for (auto& v : x) v *= v;
        CHECK(autocorr(x, 1) > 0.02);
    }
}

TEST_CASE("fourth moment condition", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.4;

    spec.alpha1 = 0.3;
    spec.beta1 = 0.3;
    CHECK(farima::garch_fourth_moment_check(spec));  // 0.27+0.09+0.18 = 0.54

    spec.alpha1 = 0.13;
    spec.beta1 = 0.88;
    CHECK_FALSE(farima::garch_fourth_moment_check(spec));  // 1.0539 > 1

    spec.alpha1 = 0.0;
    spec.beta1 = 0.0;
    CHECK(farima::garch_fourth_moment_check(spec));

    spec.family = NoiseFamily::iid_gaussian;
    CHECK_THROWS_AS(farima::garch_fourth_moment_check(spec), std::invalid_argument);
}

TEST_CASE("squared-process autocovariance closed form", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.4;
    spec.alpha1 = 0.3;
    spec.beta1 = 0.3;

    // sigma^2 = 1, gamma(0) = 2 * 0.73 / 0.46
    CHECK(farima::garch_sq_autocov(spec, 0) == Approx(2.0 * 0.73 / 0.46).epsilon(1e-12));

    // geometric decay with ratio alpha1 + beta1 exactly
    const double g1 = farima::garch_sq_autocov(spec, 1);
    for (std::size_t l = 2; l <= 8; ++l)
        REQUIRE(farima::garch_sq_autocov(spec, l) ==
                Approx(g1 * std::pow(0.6, static_cast<double>(l - 1))).epsilon(1e-12));

    // alpha1 = 0 kills every lag >= 1
    NoiseSpec pure;
    pure.family = NoiseFamily::garch11;
    pure.omega = 0.4;
    pure.alpha1 = 0.0;
    pure.beta1 = 0.3;
    CHECK(farima::garch_sq_autocov(pure, 1) == 0.0);
    CHECK(farima::garch_sq_autocov(pure, 3) == 0.0);

    // infeasible parameters rejected
    NoiseSpec bad = spec;
    bad.alpha1 = 0.6;
    bad.beta1 = 0.3;
    CHECK_THROWS_AS(farima::garch_sq_autocov(bad, 1), std::domain_error);
}

TEST_CASE("squared-process autocovariance vs simulation", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.4;
    spec.alpha1 = 0.3;
    spec.beta1 = 0.3;
    spec.seed = 99;
    const std::size_t n = 500000;
    auto x = farima::generate(spec, n, 500);
    for (auto& v : x) v *= v;
    const double m = mean(x);
    double cov1 = 0.0;
    for (std::size_t t = 1; t < n; ++t) cov1 += (x[t] - m) * (x[t - 1] - m);
    cov1 /= static_cast<double>(n - 1);
    CHECK(cov1 == Approx(farima::garch_sq_autocov(spec, 1)).epsilon(0.10));
}

TEST_CASE("generate rejects bad arguments", "[noise]") {
    NoiseSpec spec;
    CHECK_THROWS_AS(farima::generate(spec, 0, 0), std::invalid_argument);
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.0;
    CHECK_THROWS_AS(farima::generate(spec, 10, 0), std::invalid_argument);
}

TEST_CASE("same seed, same draws", "[noise]") {
    NoiseSpec spec;
    spec.family = NoiseFamily::garch11;
    spec.omega = 0.4;
    spec.alpha1 = 0.3;
    spec.beta1 = 0.3;
    spec.seed = 2024;
    CHECK(farima::generate(spec, 1000, 100) == farima::generate(spec, 1000, 100));
}
