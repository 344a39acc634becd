// farima: fit and validate weak FARIMA models from the command line.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "farima/diagnostics.hpp"
#include "farima/mc.hpp"
#include "farima/model.hpp"
#include "farima/noise.hpp"
#include "farima/series_io.hpp"

namespace {

farima::NoiseSpec make_noise_spec(const std::string& family, double omega, double alpha1,
                                  double beta1, std::uint64_t seed) {
    farima::NoiseSpec spec;
    if (family == "gaussian")
        spec.family = farima::NoiseFamily::iid_gaussian;
    else if (family == "garch")
        spec.family = farima::NoiseFamily::garch11;
    else if (family == "etaprod")
        spec.family = farima::NoiseFamily::eta_product;
    else
        throw CLI::ValidationError("--noise must be gaussian, garch or etaprod");
    spec.omega = omega;
    spec.alpha1 = alpha1;
    spec.beta1 = beta1;
    spec.seed = seed;
    return spec;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw std::runtime_error("cannot open output file " + path);
    return file;
}

int parse_ar_order(const std::string& s) {
    if (s == "auto") return -1;
    return std::stoi(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak FARIMA fitting and portmanteau diagnostics"};
    app.require_subcommand(1);

    // shared option storage
    std::string in_path, out_path, mode = "raw", noise_family = "gaussian";
    std::string ar_order = "auto", lobato_cache = "lobato_table.txt";
    int p = 0, q = 0, m_max = 12, n = 1000, reps = 200, burn = 2000, k_max = 20;
    double d_min = -0.49, d_max = 0.49, level = 0.05;
    double omega = 1.0, alpha1 = 0.0, beta1 = 0.0;
    double d0 = 0.2, true_a = 0.0, true_b = 0.0;
    std::uint64_t seed = 1;
    std::size_t n_paths = 200000, n_steps = 2000;
    std::uint64_t lobato_seed = 20230409;
    std::size_t lobato_paths = 200000, lobato_steps = 2000;
    std::vector<int> m_list = {1, 2, 3, 6, 12, 15};
    std::vector<int> n_list;

    auto* ingest = app.add_subcommand("ingest", "transform a data file into a series file");
    ingest->add_option("input", in_path, "input file, one value per line")->required();
    ingest->add_option("--mode", mode, "raw | returns | squared_centered");
    ingest->add_option("--out", out_path, "output series file")->required();

    auto* sim = app.add_subcommand("simulate", "simulate a FARIMA series");
    sim->add_option("--p", p);
    sim->add_option("--q", q);
    sim->add_option("--a", true_a, "AR(1) coefficient when p = 1");
    sim->add_option("--b", true_b, "MA(1) coefficient when q = 1");
    sim->add_option("--d0", d0, "long-memory parameter");
    sim->add_option("--n", n, "output length");
    sim->add_option("--burn", burn);
    sim->add_option("--noise", noise_family, "gaussian | garch | etaprod");
    sim->add_option("--omega", omega);
    sim->add_option("--alpha1", alpha1);
    sim->add_option("--beta1", beta1);
    sim->add_option("--seed", seed);
    sim->add_option("--out", out_path)->required();

    auto* fit_cmd = app.add_subcommand("fit", "least squares fit of a FARIMA(p,d,q)");
    fit_cmd->add_option("series", in_path)->required();
    fit_cmd->add_option("--p", p);
    fit_cmd->add_option("--q", q);
    fit_cmd->add_option("--d-min", d_min);
    fit_cmd->add_option("--d-max", d_max);
    fit_cmd->add_option("--out", out_path);

    auto* diag = app.add_subcommand("diagnose", "fit + all portmanteau tests + ACF bands");
    diag->add_option("series", in_path)->required();
    diag->add_option("--p", p);
    diag->add_option("--q", q);
    diag->add_option("--m-max", m_max);
    diag->add_option("--level", level);
    diag->add_option("--d-min", d_min);
    diag->add_option("--d-max", d_max);
    diag->add_option("--ar-order", ar_order, "auto or a fixed VAR order");
    diag->add_option("--lobato-cache", lobato_cache);
    diag->add_option("--lobato-paths", lobato_paths);
    diag->add_option("--lobato-steps", lobato_steps);
    diag->add_option("--lobato-seed", lobato_seed);
    diag->add_option("--out", out_path);

    auto* mc_size = app.add_subcommand("mc-size", "empirical size table");
    auto* mc_power = app.add_subcommand("mc-power", "empirical power table");
    for (auto* cmd : {mc_size, mc_power}) {
        cmd->add_option("--p", p, "fitted AR order");
        cmd->add_option("--q", q, "fitted MA order");
        cmd->add_option("--d0", d0, "true long-memory parameter");
        cmd->add_option("--true-a", true_a, "true AR(1) coefficient");
        cmd->add_option("--true-b", true_b, "true MA(1) coefficient");
        cmd->add_option("--n", n_list, "sample sizes");
        cmd->add_option("--m", m_list, "portmanteau lags");
        cmd->add_option("--reps", reps);
        cmd->add_option("--level", level);
        cmd->add_option("--noise", noise_family);
        cmd->add_option("--omega", omega);
        cmd->add_option("--alpha1", alpha1);
        cmd->add_option("--beta1", beta1);
        cmd->add_option("--seed", seed);
        cmd->add_option("--burn", burn);
        cmd->add_option("--d-min", d_min);
        cmd->add_option("--d-max", d_max);
        cmd->add_option("--ar-order", ar_order);
        cmd->add_option("--lobato-cache", lobato_cache);
        cmd->add_option("--lobato-paths", lobato_paths);
        cmd->add_option("--lobato-steps", lobato_steps);
        cmd->add_option("--lobato-seed", lobato_seed);
        cmd->add_option("--out", out_path);
    }

    auto* lob = app.add_subcommand("lobato-table", "tabulate U_K critical values");
    lob->add_option("--k-max", k_max);
    lob->add_option("--paths", n_paths);
    lob->add_option("--steps", n_steps);
    lob->add_option("--seed", seed);
    lob->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            farima::IngestMode im;
            if (mode == "raw")
                im = farima::IngestMode::raw;
            else if (mode == "returns")
                im = farima::IngestMode::returns;
            else if (mode == "squared_centered")
                im = farima::IngestMode::squared_centered;
            else
                throw std::runtime_error("--mode must be raw, returns or squared_centered");
            farima::write_series(out_path,
                                 farima::ingest_transform(farima::read_series(in_path), im));
        } else if (*sim) {
            farima::FarimaParams theta;
            if (p == 1) theta.ar = {true_a};
            if (q == 1) theta.ma = {true_b};
            if (p > 1 || q > 1) throw std::runtime_error("simulate: orders above 1 need --a/--b per lag; use the library API");
            theta.d = d0;
            const farima::NoiseSpec spec =
                make_noise_spec(noise_family, omega, alpha1, beta1, seed);
            const auto eps =
                farima::generate(spec, static_cast<std::size_t>(n + burn), 500);
            farima::write_series(out_path,
                                 farima::simulate(theta, eps, static_cast<std::size_t>(burn)));
        } else if (*fit_cmd) {
            const auto x = farima::read_series(in_path);
            farima::FitOptions opts;
            opts.d_min = d_min;
            opts.d_max = d_max;
            const farima::FitResult fr = farima::fit(x, p, q, opts);
            std::ofstream file;
            std::ostream& out = open_out(file, out_path);
            out.precision(10);
            out << "[fit] p=" << p << " q=" << q << " n=" << x.size()
                << " sigma2=" << fr.sigma2_hat << " objective=" << fr.objective
                << " converged=" << (fr.converged ? 1 : 0) << " iterations=" << fr.iterations
                << "\n";
            const auto packed = fr.theta_hat.packed();
            for (std::size_t i = 0; i < packed.size(); ++i)
                out << "[theta] index=" << i << " value=" << packed[i] << "\n";
        } else if (*diag) {
            const auto x = farima::read_series(in_path);
            const int need_k = std::max(m_max, 1);
            const farima::LobatoTable table = farima::load_or_generate_lobato(
                lobato_cache, std::max(20, need_k), lobato_paths, lobato_steps, lobato_seed);
            farima::FitOptions opts;
            opts.d_min = d_min;
            opts.d_max = d_max;
            const farima::DiagnosisReport rep = farima::run_diagnosis(
                x, p, q, m_max, level, table, opts, parse_ar_order(ar_order));
            std::ofstream file;
            std::ostream& out = open_out(file, out_path);
            farima::write_report(out, rep);
        } else if (*mc_size || *mc_power) {
            farima::McConfig cfg;
            cfg.fit_p = p;
            cfg.fit_q = q;
            cfg.theta_true.d = d0;
            if (*mc_power || true_a != 0.0) {
                if (true_a != 0.0) cfg.theta_true.ar = {true_a};
            }
            if (*mc_power || true_b != 0.0) {
                if (true_b != 0.0) cfg.theta_true.ma = {true_b};
            }
            cfg.noise = make_noise_spec(noise_family, omega, alpha1, beta1, seed);
            if (!n_list.empty()) cfg.n_list = n_list;
            cfg.m_list = m_list;
            cfg.n_reps = reps;
            cfg.level = level;
            cfg.seed = seed;
            cfg.burn = burn;
            cfg.fit_opts.d_min = d_min;
            cfg.fit_opts.d_max = d_max;
            cfg.ar_order = parse_ar_order(ar_order);
            int k_need = 20;
            for (int m : cfg.m_list) k_need = std::max(k_need, m);
            const farima::LobatoTable table = farima::load_or_generate_lobato(
                lobato_cache, k_need, lobato_paths, lobato_steps, lobato_seed);
            const farima::McTable t = farima::run_mc(cfg, table);
            std::ofstream file;
            std::ostream& out = open_out(file, out_path);
            farima::write_mc_table(out, t);
        } else if (*lob) {
            const farima::LobatoTable t = farima::make_lobato_table(
                k_max, n_paths, n_steps, seed);
            farima::save_lobato_table(t, out_path);
            std::cout << "wrote " << out_path << " (k_max=" << t.k_max
                      << ", singular redraws=" << t.singular_redraws << ")\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
