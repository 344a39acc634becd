#include <catch2/catch.hpp>
#include <cmath>

#include "farima/estimate.hpp"
#include "farima/model.hpp"
#include "farima/noise.hpp"

using farima::FarimaParams;
using farima::FitOptions;
using farima::NoiseSpec;

namespace {

std::vector<double> simulate_farima(const FarimaParams& theta, std::size_t n,
                                    std::uint64_t seed) {
    NoiseSpec spec;
    spec.seed = seed;
    const auto eps = farima::generate(spec, n + 2000, 0);
    return farima::simulate(theta, eps, 2000);
}

}  // namespace

TEST_CASE("white noise fit recovers d near zero", "[estimate]") {
    int hits = 0;
    for (int rep = 0; rep < 50; ++rep) {
        NoiseSpec spec;
        spec.seed = 1000 + static_cast<std::uint64_t>(rep);
        const auto x = farima::generate(spec, 5000, 0);
        const auto fr = farima::fit(x, 0, 0);
        if (std::abs(fr.theta_hat.d) <= 0.05) ++hits;
    }
    CHECK(hits >= 45);
}

TEST_CASE("FARIMA(0,0.2,0) fit is consistent", "[estimate]") {
    FarimaParams truth;
    truth.d = 0.2;
    int hits = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto x = simulate_farima(truth, 10000, 40000 + static_cast<std::uint64_t>(rep));
        const auto fr = farima::fit(x, 0, 0);
        if (std::abs(fr.theta_hat.d - 0.2) <= 0.03) ++hits;
    }
    CHECK(hits >= 45);
}

TEST_CASE("fitted point is a local minimum", "[estimate]") {
    FarimaParams truth;
    truth.ar = {-0.5};
    truth.d = 0.25;
    const auto x = simulate_farima(truth, 3000, 11);
    const auto fr = farima::fit(x, 1, 0);
    CHECK(fr.converged);

    auto objective = [&](const std::vector<double>& packed) {
        const auto th = FarimaParams::from_packed(packed, 1, 0);
        const auto rs = farima::residuals(th, x);
        double s = 0.0;
        for (double e : rs.residuals) s += e * e;
        return s / static_cast<double>(rs.n());
    };
    const auto packed = fr.theta_hat.packed();
    const double q0 = objective(packed);
    CHECK(q0 == Approx(fr.objective).epsilon(1e-12));
    for (std::size_t k = 0; k < packed.size(); ++k) {
        for (double h : {1e-3, -1e-3}) {
            auto shifted = packed;
            shifted[k] += h;
            REQUIRE(objective(shifted) >= q0 - 1e-12);
        }
    }
}

TEST_CASE("gradient norm small at the reported optimum", "[estimate]") {
    FarimaParams truth;
    truth.d = 0.15;
    const auto x = simulate_farima(truth, 4000, 21);
    const auto fr = farima::fit(x, 0, 0);
    REQUIRE(fr.converged);
    // interior optimum: the raw gradient meets the tolerance
    const Eigen::Map<const Eigen::VectorXd> eps(fr.residual_set.residuals.data(),
                                                static_cast<Eigen::Index>(fr.residual_set.n()));
    const Eigen::VectorXd grad = 2.0 / static_cast<double>(fr.residual_set.n()) *
                                 (fr.residual_set.gradients.transpose() * eps);
    CHECK(grad.cwiseAbs().maxCoeff() <= 1.01e-5);  // the default tolerance
}

TEST_CASE("J_hat matches the closed form for FARIMA(1,d,0)", "[estimate]") {
    FarimaParams truth;
    truth.ar = {-0.55};
    truth.d = 0.2;
    const auto x = simulate_farima(truth, 100000, 31);
    // evaluate at the true parameter so the target is exact
    const auto rs = farima::residual_gradients(truth, x);
    const auto J = farima::j_matrix(rs);
    const double a = -0.55;
    const double j11 = 2.0 / (1.0 - a * a);
    const double j12 = -2.0 * std::log(1.0 - a) / a;
    const double j22 = 2.0 * 1.6449340668482264;
    CHECK(J(0, 0) == Approx(j11).epsilon(0.05));
    CHECK(J(0, 1) == Approx(j12).epsilon(0.05));
    CHECK(J(1, 0) == J(0, 1));
    CHECK(J(1, 1) == Approx(j22).epsilon(0.05));
}

TEST_CASE("J_hat in the a -> 0 limit", "[estimate]") {
    FarimaParams truth;
    truth.ar = {0.0};
    truth.d = 0.1;
    const auto x = simulate_farima(truth, 200000, 37);
    const auto rs = farima::residual_gradients(truth, x);
    const auto J = farima::j_matrix(rs);
    CHECK(J(0, 0) == Approx(2.0).epsilon(0.05));
    CHECK(J(0, 1) == Approx(2.0).epsilon(0.05));  // -ln(1-a)/a -> 1
    CHECK(J(1, 1) == Approx(2.0 * 1.6449340668482264).epsilon(0.05));
}

TEST_CASE("J_hat is symmetric positive semidefinite", "[estimate]") {
    FarimaParams truth;
    truth.ar = {0.4};
    truth.ma = {-0.2};
    truth.d = 0.1;
    const auto x = simulate_farima(truth, 2000, 3);
    const auto fr = farima::fit(x, 1, 1);
    CHECK((fr.j_hat - fr.j_hat.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fr.j_hat);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("scale equivariance of the fit", "[estimate]") {
    FarimaParams truth;
    truth.d = 0.2;
    const auto x = simulate_farima(truth, 3000, 47);
    auto x2 = x;
    for (auto& v : x2) v *= 2.0;
    const auto f1 = farima::fit(x, 0, 0);
    const auto f2 = farima::fit(x2, 0, 0);
    CHECK(f2.theta_hat.d == Approx(f1.theta_hat.d).margin(1e-6));
    CHECK(f2.sigma2_hat == Approx(4.0 * f1.sigma2_hat).epsilon(1e-10));
}

TEST_CASE("fit rejects short series and bad bounds", "[estimate]") {
    const std::vector<double> tiny(15, 1.0);
    CHECK_THROWS_AS(farima::fit(tiny, 1, 1), std::invalid_argument);
    const std::vector<double> x(200, 1.0);
    FitOptions opts;
    opts.d_min = 0.3;
    opts.d_max = 0.1;
    CHECK_THROWS_AS(farima::fit(x, 0, 0, opts), std::invalid_argument);
}
