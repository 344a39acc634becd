#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "farima/rng.hpp"

namespace farima {

/**
 * @brief Monte Carlo quantile table of the self-normalized limit
 * U_K = B_K'(1) V_K^{-1} B_K(1), V_K = int_0^1 bridge bridge' dr.
 */
struct LobatoTable {
    int k_max = 0;
    std::vector<double> levels;
    Eigen::MatrixXd quantiles;  // k_max x levels
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::uint64_t seed = 0;
    int singular_redraws = 0;
};

namespace detail {

/// One path of U_K draws for every K = 1..k_max (shared Brownian motion:
/// the first K coordinates of B_{k_max} are a B_K).
/// Returns false when some V_K is numerically singular.
inline bool lobato_path(Rng& rng, int k_max, std::size_t n_steps, double* out_u) {
    const auto K = static_cast<Eigen::Index>(k_max);
    Eigen::VectorXd B = Eigen::VectorXd::Zero(K);
    Eigen::VectorXd b1(K);
    const double sd = 1.0 / std::sqrt(static_cast<double>(n_steps));
    // two passes would need the path stored; instead accumulate
    // sum B_i B_i', sum r_i B_i and r-moments to form V via the bridge identity
    Eigen::MatrixXd SBB = Eigen::MatrixXd::Zero(K, K);
    Eigen::VectorXd SrB = Eigen::VectorXd::Zero(K);
    double Sr2 = 0.0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
        for (Eigen::Index k = 0; k < K; ++k) B(k) += sd * rng.gaussian();
        const double r = static_cast<double>(i) / static_cast<double>(n_steps);
        SBB.selfadjointView<Eigen::Lower>().rankUpdate(B, 1.0);
        SrB += r * B;
        Sr2 += r * r;
    }
    b1 = B;
    Eigen::MatrixXd V = Eigen::MatrixXd(SBB.selfadjointView<Eigen::Lower>());
    V -= SrB * b1.transpose();
    V -= b1 * SrB.transpose();
    V += Sr2 * (b1 * b1.transpose());
    V /= static_cast<double>(n_steps);
    // leading-submatrix solves give U_K for every K at once
    for (int k = 1; k <= k_max; ++k) {
        const Eigen::MatrixXd Vk = V.topLeftCorner(k, k);
        Eigen::LLT<Eigen::MatrixXd> llt(Vk);
        if (llt.info() != Eigen::Success) return false;
        const Eigen::VectorXd bk = b1.head(k);
        out_u[k - 1] = bk.dot(llt.solve(bk));
    }
    return true;
}

inline double empirical_quantile(std::vector<double>& sorted_draws, double level) {
    const std::size_t n = sorted_draws.size();
    if (n == 0) throw std::invalid_argument("empirical_quantile: no draws");
    const double pos = level * static_cast<double>(n - 1);
    const auto i0 = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i0);
    if (i0 + 1 >= n) return sorted_draws.back();
    return sorted_draws[i0] * (1.0 - frac) + sorted_draws[i0 + 1] * frac;
}

}  // namespace detail

/**
 * @brief Draws of U_K for a single K.
 *
 * Each path discretizes B_K on a uniform grid with Gaussian increments of
 * variance 1/n_steps and integrates the bridge outer product by the rectangle
 * rule. Singular V_K draws are redrawn and counted.
 */
inline std::vector<double> simulate_u_k(int k, std::size_t n_paths, std::size_t n_steps,
                                        std::uint64_t seed, int* singular_count = nullptr) {
    if (k < 1) throw std::invalid_argument("simulate_u_k: k must be >= 1");
    if (n_steps < 100) throw std::invalid_argument("simulate_u_k: n_steps must be >= 100");
    if (n_paths < 1000) throw std::invalid_argument("simulate_u_k: n_paths must be >= 1000");
    Rng master(seed);
    std::vector<double> draws(n_paths);
    int redraws = 0;
    for (std::size_t p = 0; p < n_paths; ++p) {
        Rng rng = master.derive_stream(p);
        double u;
        while (!detail::lobato_path(rng, k, n_steps, &u)) ++redraws;
        draws[p] = u;
    }
    if (singular_count) *singular_count = redraws;
    return draws;
}

/// Full table over K = 1..k_max; parallel over paths with per-path seeds, so
/// the result does not depend on the thread count.
inline LobatoTable make_lobato_table(int k_max = 20, std::size_t n_paths = 200000,
                                     std::size_t n_steps = 2000, std::uint64_t seed = 20230409,
                                     std::vector<double> levels = {0.90, 0.95, 0.99},
                                     int n_threads = 0) {
    if (k_max < 1) throw std::invalid_argument("make_lobato_table: k_max must be >= 1");
    if (n_steps < 100 || n_paths < 1000)
        throw std::invalid_argument("make_lobato_table: n_steps >= 100 and n_paths >= 1000");
    std::sort(levels.begin(), levels.end());
    const Rng master(seed);
    std::vector<double> all(n_paths * static_cast<std::size_t>(k_max));
    std::vector<int> redraws_per_thread;
    if (n_threads <= 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    redraws_per_thread.assign(static_cast<std::size_t>(n_threads), 0);
    auto worker = [&](int w) {
        int redraws = 0;
        for (std::size_t p = static_cast<std::size_t>(w); p < n_paths;
             p += static_cast<std::size_t>(n_threads)) {
            Rng rng = master.derive_stream(p);
            while (!detail::lobato_path(rng, k_max, n_steps,
                                        &all[p * static_cast<std::size_t>(k_max)]))
                ++redraws;
        }
        redraws_per_thread[static_cast<std::size_t>(w)] = redraws;
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < n_threads; ++w) pool.emplace_back(worker, w);
    worker(0);
    for (auto& t : pool) t.join();

    LobatoTable table;
    table.k_max = k_max;
    table.levels = levels;
    table.n_paths = n_paths;
    table.n_steps = n_steps;
    table.seed = seed;
    for (int r : redraws_per_thread) table.singular_redraws += r;
    table.quantiles.resize(k_max, static_cast<Eigen::Index>(levels.size()));
    std::vector<double> col(n_paths);
    for (int k = 1; k <= k_max; ++k) {
        for (std::size_t p = 0; p < n_paths; ++p)
            col[p] = all[p * static_cast<std::size_t>(k_max) + static_cast<std::size_t>(k - 1)];
        std::sort(col.begin(), col.end());
        for (std::size_t l = 0; l < levels.size(); ++l)
            table.quantiles(k - 1, static_cast<Eigen::Index>(l)) =
                detail::empirical_quantile(col, levels[l]);
    }
    return table;
}

/// Critical value U_k(level); the level must be one of the tabulated ones.
inline double critical_value(const LobatoTable& table, int k, double level) {
    if (k < 1 || k > table.k_max) throw std::invalid_argument("critical_value: k out of range");
    for (std::size_t l = 0; l < table.levels.size(); ++l)
        if (std::abs(table.levels[l] - level) < 1e-12)
            return table.quantiles(k - 1, static_cast<Eigen::Index>(l));
    throw std::invalid_argument("critical_value: level not tabulated");
}

inline void save_lobato_table(const LobatoTable& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_lobato_table: cannot open " + path);
    out << "# self-normalized portmanteau critical values (U_K quantiles)\n";
    out << "version 1\n";
    out << "k_max " << t.k_max << "\n";
    out << "n_paths " << t.n_paths << "\n";
    out << "n_steps " << t.n_steps << "\n";
    out << "seed " << t.seed << "\n";
    out << "levels";
    out.precision(6);
    for (double l : t.levels) out << " " << l;
    out << "\n";
    for (int k = 1; k <= t.k_max; ++k) {
        out << k;
        for (Eigen::Index l = 0; l < t.quantiles.cols(); ++l) out << " " << t.quantiles(k - 1, l);
        out << "\n";
    }
}

inline std::optional<LobatoTable> load_lobato_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    LobatoTable t;
    std::string line;
    int version = 0;
    std::size_t n_levels = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "version")
            ss >> version;
        else if (key == "k_max")
            ss >> t.k_max;
        else if (key == "n_paths")
            ss >> t.n_paths;
        else if (key == "n_steps")
            ss >> t.n_steps;
        else if (key == "seed")
            ss >> t.seed;
        else if (key == "levels") {
            double v;
            while (ss >> v) t.levels.push_back(v);
            n_levels = t.levels.size();
            break;
        }
    }
    if (version != 1 || t.k_max < 1 || n_levels == 0) return std::nullopt;
    t.quantiles.resize(t.k_max, static_cast<Eigen::Index>(n_levels));
    for (int k = 1; k <= t.k_max; ++k) {
        if (!std::getline(in, line)) return std::nullopt;
        std::istringstream ss(line);
        int kk;
        if (!(ss >> kk) || kk != k) return std::nullopt;
        for (std::size_t l = 0; l < n_levels; ++l)
            if (!(ss >> t.quantiles(k - 1, static_cast<Eigen::Index>(l)))) return std::nullopt;
    }
    return t;
}

/// Cached table: reload when the stored parameters match, regenerate (and
/// rewrite the cache) on any mismatch.
inline LobatoTable load_or_generate_lobato(const std::string& path, int k_max = 20,
                                           std::size_t n_paths = 200000,
                                           std::size_t n_steps = 2000,
                                           std::uint64_t seed = 20230409,
                                           std::vector<double> levels = {0.90, 0.95, 0.99},
                                           int n_threads = 0) {
    std::sort(levels.begin(), levels.end());
    if (auto t = load_lobato_table(path)) {
        if (t->k_max == k_max && t->n_paths == n_paths && t->n_steps == n_steps &&
            t->seed == seed && t->levels == levels)
            return *t;
    }
    LobatoTable t = make_lobato_table(k_max, n_paths, n_steps, seed, levels, n_threads);
    save_lobato_table(t, path);
    // hand back the persisted precision so later cache hits see identical values
    if (auto reloaded = load_lobato_table(path)) return *reloaded;
    return t;
}

}  // namespace farima
