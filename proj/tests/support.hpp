#pragma once

// Shared helpers for the test suites: fixture loading, error-code capture and
// seeded random generators for the property tests.

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "effbench/effbench.hpp"

namespace testutil {

inline std::string data_path(const std::string& name) {
    return std::string(EFFBENCH_DATA_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline std::vector<effbench::MethodSeries> load_series(const std::string& name) {
    return effbench::group_series(effbench::parse_runs_delimited(read_file(data_path(name))));
}

inline const effbench::MethodSeries& series_of(const std::vector<effbench::MethodSeries>& all,
                                               const std::string& method) {
    for (const effbench::MethodSeries& s : all)
        if (s.method() == method) return s;
    throw std::runtime_error("no series for " + method);
}

/// Runs fn, which must throw effbench::error, and returns its code.
template <typename Fn>
effbench::errc thrown_code(Fn&& fn) {
    try {
        std::forward<Fn>(fn)();
    } catch (const effbench::error& e) {
        return e.code();
    }
    throw std::runtime_error("expected an effbench::error");
}

template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        std::forward<Fn>(fn)();
    } catch (const effbench::error& e) {
        return e.what();
    }
    throw std::runtime_error("expected an effbench::error");
}

inline double rel_diff(double a, double b) {
    const double denom = std::max(std::abs(a), std::abs(b));
    return denom == 0.0 ? 0.0 : std::abs(a - b) / denom;
}

/// Log-uniform draw in [lo, hi].
inline double log_uniform(effbench::SplitMix64& rng, double lo, double hi) {
    return std::exp(rng.next_in(std::log(lo), std::log(hi)));
}

/// A random adjacent-interval pair with sizes in [1e2, 1e9], times in
/// [min_time, max_time] (default [1, 1e7]) and positive scores in
/// [1e-3, 1e3] for the given keys.
inline effbench::IntervalPair random_pair(effbench::SplitMix64& rng,
                                          const std::vector<std::string>& keys = {"S"},
                                          double min_time = 1.0, double max_time = 1e7) {
    const long long d_lo = static_cast<long long>(log_uniform(rng, 1e2, 1e8));
    const long long d_hi = d_lo + std::max<long long>(1, static_cast<long long>(log_uniform(
                                                             rng, 1.0, 1e9 - double(d_lo))));
    effbench::RunRecord lo;
    lo.method = "RAND";
    lo.dataset = "SYNTH";
    lo.split_index = 1;
    lo.train_size = d_lo;
    lo.train_time_s = log_uniform(rng, min_time, max_time);
    effbench::RunRecord hi = lo;
    hi.split_index = 2;
    hi.train_size = d_hi;
    hi.train_time_s = log_uniform(rng, min_time, max_time);
    for (const std::string& key : keys) {
        lo.scores[key] = log_uniform(rng, 1e-3, 1e3);
        hi.scores[key] = log_uniform(rng, 1e-3, 1e3);
    }
    return effbench::IntervalPair(std::move(lo), std::move(hi));
}

/// A random valid series of `n` runs with positive scores; sizes and times
/// are monotone, scores are free to wander.
inline effbench::MethodSeries random_series(effbench::SplitMix64& rng, int n,
                                            const std::vector<std::string>& keys = {"S"}) {
    std::vector<effbench::RunRecord> runs;
    long long size = static_cast<long long>(log_uniform(rng, 1e2, 1e6));
    for (int i = 1; i <= n; ++i) {
        effbench::RunRecord run;
        run.method = "RAND";
        run.dataset = "SYNTH";
        run.split_index = i;
        run.train_size = size;
        run.train_time_s = log_uniform(rng, 1.0, 1e7);
        for (const std::string& key : keys) run.scores[key] = log_uniform(rng, 1e-3, 1e3);
        runs.push_back(std::move(run));
        size += std::max<long long>(1, static_cast<long long>(log_uniform(rng, 1.0, 1e8)));
    }
    return effbench::MethodSeries(std::move(runs));
}

}  // namespace testutil
