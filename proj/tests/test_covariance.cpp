#include <catch2/catch.hpp>
#include <cmath>

#include "farima/covariance.hpp"
#include "farima/estimate.hpp"
#include "farima/model.hpp"
#include "farima/noise.hpp"
#include "farima/rng.hpp"

using farima::FarimaParams;
using farima::NoiseSpec;

namespace {

std::vector<double> simulate_farima(const FarimaParams& theta, std::size_t n, std::uint64_t seed) {
    NoiseSpec spec;
    spec.seed = seed;
    const auto eps = farima::generate(spec, n + 2000, 0);
    return farima::simulate(theta, eps, 2000);
}

}  // namespace

TEST_CASE("psi_hat matches the FARIMA(1,d,0) closed form", "[covariance]") {
    FarimaParams truth;
    truth.ar = {-0.55};
    truth.d = 0.2;
    const double a = -0.55;
    const auto x = simulate_farima(truth, 100000, 101);
    const auto rs = farima::residual_gradients(truth, x);
    const int m = 4;
    const auto psi = farima::psi_hat(rs, m);
    // Psi(i, .) = -sigma^2 (a^{i-1}, 1/i) with sigma^2 = 1
    for (int i = 1; i <= m; ++i) {
        REQUIRE(psi(i - 1, 0) ==
                Approx(-std::pow(a, i - 1)).margin(0.05 * std::abs(std::pow(a, i - 1)) + 0.01));
        REQUIRE(psi(i - 1, 1) == Approx(-1.0 / i).margin(0.05 / i + 0.01));
    }
}

TEST_CASE("psi_hat d-column for the pure fractional model", "[covariance]") {
    FarimaParams truth;
    truth.d = 0.2;
    const auto x = simulate_farima(truth, 100000, 103);
    const auto rs = farima::residual_gradients(truth, x);
    const auto psi = farima::psi_hat(rs, 6);
    for (int i = 1; i <= 6; ++i)
        REQUIRE(psi(i - 1, 0) == Approx(-1.0 / i).margin(0.05 / i + 0.01));
}

TEST_CASE("psi_hat of zero residuals is zero", "[covariance]") {
    farima::ResidualSet rs;
    rs.residuals.assign(100, 0.0);
    rs.gradients = Eigen::MatrixXd::Random(100, 2);
    CHECK(farima::psi_hat(rs, 3).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(farima::psi_hat(rs, 100), std::invalid_argument);
}

TEST_CASE("u_hat columns reproduce the autocovariances", "[covariance]") {
    FarimaParams truth;
    truth.d = 0.15;
    const auto x = simulate_farima(truth, 3000, 7);
    const auto fr = farima::fit(x, 0, 0);
    const int m = 3;
    const auto u = farima::u_hat(fr.residual_set, fr.j_hat, m);
    REQUIRE(u.values.cols() == 1 + m);
    const auto& e = fr.residual_set.residuals;
    const double n = static_cast<double>(e.size());
    for (int h = 1; h <= m; ++h) {
        double gamma_h = 0.0;
        for (std::size_t t = static_cast<std::size_t>(h); t < e.size(); ++t)
            gamma_h += e[t] * e[t - static_cast<std::size_t>(h)];
        gamma_h /= n;
        CHECK(u.values.col(h).mean() == Approx(gamma_h).margin(1e-14));
    }
    // score block has near-zero column means at the optimum
    CHECK(std::abs(u.values.col(0).mean()) < 1e-3);
}

TEST_CASE("u_hat with m = 0 has only the score block", "[covariance]") {
    FarimaParams truth;
    truth.d = 0.1;
    const auto x = simulate_farima(truth, 500, 13);
    const auto fr = farima::fit(x, 0, 0);
    const auto u = farima::u_hat(fr.residual_set, fr.j_hat, 0);
    CHECK(u.values.cols() == 1);
}

TEST_CASE("spectral estimator on iid rows approaches the sample covariance", "[covariance]") {
    farima::Rng rng(5);
    const int n = 20000;
    Eigen::MatrixXd u(n, 2);
    for (int t = 0; t < n; ++t) {
        u(t, 0) = rng.gaussian();
        u(t, 1) = 0.5 * u(t, 0) + std::sqrt(0.75) * rng.gaussian();
    }
    const auto sx = farima::spectral_ar_xi(u, 1);
    const Eigen::MatrixXd centered = u.rowwise() - u.colwise().mean();
    const Eigen::MatrixXd sample_cov = centered.transpose() * centered / double(n);
    CHECK((sx.xi - sample_cov).cwiseAbs().maxCoeff() < 0.10 * sample_cov(0, 0) + 0.05);
}

TEST_CASE("spectral estimator long-run variance of an AR(1)", "[covariance]") {
    farima::Rng rng(6);
    const int n = 100000;
    Eigen::MatrixXd u(n, 1);
    double prev = 0.0;
    for (int t = 0; t < n; ++t) {
        prev = 0.5 * prev + rng.gaussian();
        u(t, 0) = prev;
    }
    const auto sx = farima::spectral_ar_xi(u, 1);
    CHECK(sx.xi(0, 0) == Approx(4.0).epsilon(0.10));  // 1/(1-0.5)^2
}

TEST_CASE("auto VAR order respects the n^{1/5} cap", "[covariance]") {
    farima::Rng rng(8);
    Eigen::MatrixXd u(1000, 2);
    for (int t = 0; t < 1000; ++t) {
        u(t, 0) = rng.gaussian();
        u(t, 1) = rng.gaussian();
    }
    const auto sx = farima::spectral_ar_xi(u, -1);
    CHECK(sx.r_used >= 1);
    CHECK(sx.r_used <= 3);  // floor(1000^{1/5}) = 3
}

TEST_CASE("strong-case sigma_rho for FARIMA(0,d,0), m = 1", "[covariance]") {
    FarimaParams truth;
    truth.d = 0.2;
    const auto x = simulate_farima(truth, 100000, 19);
    const auto rs = farima::residual_gradients(truth, x);
    const auto J = farima::j_matrix(rs);
    double sig2 = 0.0;
    for (double e : rs.residuals) sig2 += e * e;
    sig2 /= static_cast<double>(rs.n());
    const auto psi = farima::psi_hat(rs, 1);
    const auto S = farima::strong_sigma_rho(psi, J, sig2, 1);
    CHECK(S(0, 0) == Approx(1.0 - 6.0 / (1.6449340668482264 * 6.0)).margin(0.02));
    // 1 - 6/pi^2 = 0.392073...
    CHECK(S(0, 0) == Approx(0.392073).margin(0.02));
}

TEST_CASE("strong sigma_rho trace approx m - (p+q+1) at large m", "[covariance]") {
    FarimaParams truth;
    truth.ar = {-0.5};
    truth.d = 0.2;
    const auto x = simulate_farima(truth, 50000, 23);
    const auto rs = farima::residual_gradients(truth, x);
    const auto J = farima::j_matrix(rs);
    double sig2 = 0.0;
    for (double e : rs.residuals) sig2 += e * e;
    sig2 /= static_cast<double>(rs.n());
    const int m = 20;
    const auto S = farima::strong_sigma_rho(farima::psi_hat(rs, m), J, sig2, m);
    CHECK(S.trace() == Approx(static_cast<double>(m - 2)).margin(0.35));
}

TEST_CASE("strong sigma_rho with zero psi is the identity", "[covariance]") {
    const Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(3, 2);
    const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(2, 2);
    const auto S = farima::strong_sigma_rho(psi, J, 1.0, 3);
    CHECK((S - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assembled sigma_rho agrees with the strong form under iid noise", "[covariance]") {
    FarimaParams truth;
    truth.ar = {0.3};
    truth.ma = {-0.4};
    truth.d = 0.15;
    const auto x = simulate_farima(truth, 100000, 29);
    const auto fr = farima::fit(x, 1, 1);
    const int m = 5;
    const auto psi = farima::psi_hat(fr.residual_set, m);
    const auto u = farima::u_hat(fr.residual_set, fr.j_hat, m);
    const auto sx = farima::spectral_ar_xi(u.values, -1);
    const auto cov = farima::assemble_sigma_rho(psi, sx.xi, fr.sigma2_hat, m, sx.r_used);
    const auto strong = farima::strong_sigma_rho(psi, fr.j_hat, fr.sigma2_hat, m);
    CHECK((cov.sigma_rho - strong).cwiseAbs().maxCoeff() < 0.12);
    CHECK(cov.sigma_rho.isApprox(cov.sigma_rho.transpose(), 1e-12));
    for (double ev : cov.eigenvalues) REQUIRE(ev >= 0.0);
    CHECK(std::is_sorted(cov.eigenvalues.rbegin(), cov.eigenvalues.rend()));
    CHECK(cov.sigma_gamma.isApprox(cov.sigma_rho * fr.sigma2_hat * fr.sigma2_hat, 1e-10));
    CHECK(cov.ar_order == sx.r_used);
    CHECK(cov.clipped < 0.05);  // well-conditioned run: essentially no clipping

    // block consistency: the bottom-right block of Xi agrees with the spectral
    // estimate recomputed from the autocovariance columns alone
    const auto sx2 = farima::spectral_ar_xi(u.values.rightCols(m), sx.r_used);
    CHECK((sx.xi.bottomRightCorner(m, m) - sx2.xi).cwiseAbs().maxCoeff() <
          0.15 * fr.sigma2_hat * fr.sigma2_hat + 0.05);
}

TEST_CASE("assemble_sigma_rho rejects bad blocks", "[covariance]") {
    const Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(3, 2);
    Eigen::MatrixXd xi = Eigen::MatrixXd::Identity(5, 5);
    CHECK_THROWS_AS(farima::assemble_sigma_rho(psi, Eigen::MatrixXd::Identity(4, 4), 1.0, 3),
                    std::invalid_argument);
    xi(0, 0) = std::nan("");
    CHECK_THROWS_AS(farima::assemble_sigma_rho(psi, xi, 1.0, 3), std::invalid_argument);
}
