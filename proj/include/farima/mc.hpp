#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "farima/covariance.hpp"
#include "farima/estimate.hpp"
#include "farima/lobato.hpp"
#include "farima/model.hpp"
#include "farima/noise.hpp"
#include "farima/portmanteau.hpp"

namespace farima {

/// Monte Carlo experiment: simulate theta_true under the given noise, fit a
/// FARIMA(fit_p, d, fit_q), run all six tests for each (n, m) cell.
struct McConfig {
    int fit_p = 0;
    int fit_q = 0;
    FarimaParams theta_true;
    NoiseSpec noise;
    std::vector<int> n_list{1000};
    std::vector<int> m_list{1, 2, 3, 6, 12, 15};
    int n_reps = 200;
    double level = 0.05;
    std::uint64_t seed = 1;
    int burn = 2000;
    int noise_burn = 500;
    FitOptions fit_opts{};
    int ar_order = -1;  // VAR order for the spectral estimator; -1 = auto BIC
    int n_threads = 0;  // 0 = hardware concurrency
};

inline constexpr std::array<TestMethod, 6> kMcMethods = {
    TestMethod::lb_sn,  TestMethod::bp_sn,  TestMethod::lb_weak,
    TestMethod::bp_weak, TestMethod::lb_standard, TestMethod::bp_standard};

struct McCell {
    int n = 0;
    int m = 0;
    std::array<double, 6> freq{};       // rejection frequency per method
    std::array<bool, 6> applicable{};   // standard tests need m > p+q+1
    std::array<bool, 6> flagged{};      // outside the binomial band
    int rejections[6] = {0, 0, 0, 0, 0, 0};
};

struct McTable {
    std::vector<McCell> cells;  // ordered by (n, m)
    int n_reps = 0;
    int completed_reps = 0;
    int failed_reps = 0;
    double level = 0.05;
    double band_lo = 0.0;  // binomial 95% band around the level
    double band_hi = 0.0;
    std::vector<std::string> failures;
};

/**
 * @brief Run the size/power experiment.
 *
 * Per-replication seeds come from the master seed and the replication index,
 * so parallel and serial runs produce identical tables. Failed replications
 * are counted and excluded.
 */
inline McTable run_mc(const McConfig& cfg, const LobatoTable& lobato) {
    if (cfg.n_reps < 1) throw std::invalid_argument("run_mc: n_reps must be >= 1");
    if (cfg.n_list.empty() || cfg.m_list.empty())
        throw std::invalid_argument("run_mc: empty n or m list");
    int n_max = 0;
    for (int n : cfg.n_list) n_max = std::max(n_max, n);
    for (int m : cfg.m_list)
        if (m >= *std::min_element(cfg.n_list.begin(), cfg.n_list.end()))
            throw std::invalid_argument("run_mc: every m must be < min(n_list)");
    for (int m : cfg.m_list)
        if (m > lobato.k_max) throw std::invalid_argument("run_mc: m exceeds the Lobato table");

    McTable table;
    table.n_reps = cfg.n_reps;
    table.level = cfg.level;
    const double half =
        1.959963985 * std::sqrt(cfg.level * (1.0 - cfg.level) / static_cast<double>(cfg.n_reps));
    table.band_lo = cfg.level - half;
    table.band_hi = cfg.level + half;
    for (int n : cfg.n_list)
        for (int m : cfg.m_list) {
            McCell cell;
            cell.n = n;
            cell.m = m;
            table.cells.push_back(cell);
        }

    std::mutex mu;
    std::atomic<int> next_rep{0};
    const double sn_levels[1] = {1.0 - cfg.level};
    const double levels[1] = {cfg.level};

    auto worker = [&]() {
        for (;;) {
            const int rep = next_rep.fetch_add(1);
            if (rep >= cfg.n_reps) return;
            try {
                NoiseSpec spec = cfg.noise;
                std::uint64_t s = cfg.seed;
                spec.seed = splitmix64(s) ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(rep) + 1));
                const std::vector<double> eps =
                    generate(spec, static_cast<std::size_t>(n_max + cfg.burn),
                             static_cast<std::size_t>(cfg.noise_burn));
                const std::vector<double> x_full =
                    simulate(cfg.theta_true, eps, static_cast<std::size_t>(cfg.burn));
                for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
                    const int n = cfg.n_list[ni];
                    std::span<const double> x(x_full.data(), static_cast<std::size_t>(n));
                    const FitResult fr = fit(x, cfg.fit_p, cfg.fit_q, cfg.fit_opts);
                    for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi) {
                        const int m = cfg.m_list[mi];
                        const Eigen::MatrixXd psi = psi_hat(fr.residual_set, m);
                        const UhatSeries u = u_hat(fr.residual_set, fr.j_hat, m);
                        const SpectralXi sx = spectral_ar_xi(u.values, cfg.ar_order);
                        const RhoCovariance cov =
                            assemble_sigma_rho(psi, sx.xi, fr.sigma2_hat, m, sx.r_used);
                        auto [bpw, lbw] = weak_portmanteau(fr, cov, m, levels);
                        auto [bps, lbs] = standard_portmanteau(fr, m, levels);
                        auto [bpsn, lbsn] = sn_portmanteau(fr, u, psi, m, lobato, sn_levels);
                        const TestReport* reports[6] = {&lbsn, &bpsn, &lbw, &bpw, &lbs, &bps};
                        std::lock_guard<std::mutex> lock(mu);
                        McCell& cell = table.cells[ni * cfg.m_list.size() + mi];
                        for (int k = 0; k < 6; ++k) {
                            if (reports[k]->not_applicable) continue;
                            cell.applicable[static_cast<std::size_t>(k)] = true;
                            bool rejected = false;
                            if (reports[k]->p_value)
                                rejected = *reports[k]->p_value < cfg.level;
                            else
                                rejected = reports[k]->reject_at.begin()->second;
                            if (rejected) ++cell.rejections[k];
                        }
                    }
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                ++table.failed_reps;
                if (table.failures.size() < 20)
                    table.failures.push_back("rep " + std::to_string(rep) + ": " + e.what());
            }
        }
    };

    int n_threads = cfg.n_threads;
    if (n_threads <= 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    table.completed_reps = cfg.n_reps - table.failed_reps;
    const double denom = std::max(1, table.completed_reps);
    for (auto& cell : table.cells)
        for (int k = 0; k < 6; ++k) {
            cell.freq[static_cast<std::size_t>(k)] = cell.rejections[k] / denom;
            cell.flagged[static_cast<std::size_t>(k)] =
                cell.applicable[static_cast<std::size_t>(k)] &&
                (cell.freq[static_cast<std::size_t>(k)] < table.band_lo ||
                 cell.freq[static_cast<std::size_t>(k)] > table.band_hi);
        }
    return table;
}

/// Rejection frequency of a method in a given cell; -1 when not applicable.
inline double mc_frequency(const McTable& t, int n, int m, TestMethod method) {
    for (const auto& cell : t.cells) {
        if (cell.n != n || cell.m != m) continue;
        for (std::size_t k = 0; k < kMcMethods.size(); ++k)
            if (kMcMethods[k] == method)
                return cell.applicable[k] ? cell.freq[k] : -1.0;
    }
    throw std::invalid_argument("mc_frequency: no such cell");
}

/// Human table plus machine-readable records, one per (n, m, method).
inline void write_mc_table(std::ostream& out, const McTable& t) {
    out.precision(6);
    out << "# rejection frequencies at level " << t.level << ", N = " << t.completed_reps
        << " replications";
    if (t.failed_reps > 0) out << " (" << t.failed_reps << " failed, excluded)";
    out << "\n";
    out << "# binomial 95% band: [" << t.band_lo << ", " << t.band_hi
        << "]; cells outside the band are flagged with *\n";
    static const char* names[6] = {"lb_sn", "bp_sn", "lb_weak", "bp_weak", "lb_standard",
                                   "bp_standard"};
    for (const auto& cell : t.cells) {
        for (int k = 0; k < 6; ++k) {
            out << "[mc] n=" << cell.n << " m=" << cell.m << " method=" << names[k];
            if (!cell.applicable[static_cast<std::size_t>(k)]) {
                out << " freq=na\n";
                continue;
            }
            out << " freq=" << cell.freq[static_cast<std::size_t>(k)]
                << " flag=" << (cell.flagged[static_cast<std::size_t>(k)] ? "*" : "-") << "\n";
        }
    }
    for (const auto& f : t.failures) out << "[mc_failure] " << f << "\n";
}

}  // namespace farima
