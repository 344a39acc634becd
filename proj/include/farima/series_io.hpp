#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace farima {

/// Read a series file: one decimal value per line, blank lines and lines
/// starting with '#' ignored. Non-numeric rows are reported with line numbers.
inline std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_series: cannot open " + path);
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        std::istringstream ss(line.substr(start));
        double v;
        if (!(ss >> v) || !std::isfinite(v))
            throw std::runtime_error("read_series: non-numeric row at line " +
                                     std::to_string(lineno) + " of " + path);
        out.push_back(v);
    }
    return out;
}

inline void write_series(const std::string& path, const std::vector<double>& values) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_series: cannot open " + path);
    out.precision(17);
    for (double v : values) out << v << "\n";
}

enum class IngestMode { raw, returns, squared_centered };

/**
 * @brief Preprocess ingested data.
 *
 * raw: pass-through; returns: prices to r_t = 100 log(p_t / p_{t-1});
 * squared_centered: a returns series to r_t^2 minus its sample mean.
 */
inline std::vector<double> ingest_transform(const std::vector<double>& input, IngestMode mode) {
    switch (mode) {
        case IngestMode::raw:
            return input;
        case IngestMode::returns: {
            if (input.size() < 2)
                throw std::invalid_argument("ingest: returns mode needs at least 2 rows");
            std::vector<double> r(input.size() - 1);
            for (std::size_t t = 1; t < input.size(); ++t) {
                if (input[t] <= 0.0 || input[t - 1] <= 0.0)
                    throw std::domain_error("ingest: non-positive price at row " +
                                            std::to_string(t + 1));
                r[t - 1] = 100.0 * std::log(input[t] / input[t - 1]);
            }
            return r;
        }
        case IngestMode::squared_centered: {
            // input is a returns series; output is r_t^2 minus its sample mean
            if (input.empty()) throw std::invalid_argument("ingest: empty input");
            std::vector<double> r(input.size());
            double mean = 0.0;
            for (std::size_t t = 0; t < input.size(); ++t) {
                r[t] = input[t] * input[t];
                mean += r[t];
            }
            mean /= static_cast<double>(r.size());
            for (double& v : r) v -= mean;
            return r;
        }
    }
    throw std::logic_error("ingest: unknown mode");
}

}  // namespace farima
