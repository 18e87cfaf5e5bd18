#pragma once

// Data-efficiency metrics over adjacent-interval pairs.
//
// Absolute metrics:   Sigma = ds/dd,  Theta = dt/dd,  E = ds/dt
// Relative metrics:   sigma = 100*(ds/s)/(dd/d),  theta = 100*(dt/t)/(dd/d),
//                     epsilon = sigma/theta
// where the base values s, t, d are those of the lower run of the interval.
//
// These are linear approximations that characterize a method locally, on one
// data interval; the harness deliberately never aggregates them across
// intervals into a single global scalar.
//
// Theta's inverse (extra samples absorbed per extra second of training) is a
// whole-run quantity and is not a trainer's per-update throughput; neither
// throughput nor the inverse itself is computed here.

#include <string>
#include <vector>

#include "effbench/core.hpp"

namespace effbench {

/// Score gain, extra time and score-per-second over one interval. Negative
/// deltas propagate as negative metrics; nothing is clamped.
inline AbsoluteEfficiency absolute_efficiency(const IntervalPair& pair,
                                              const std::string& score_key) {
    const double dd = static_cast<double>(pair.data_delta());
    if (!(dd > 0.0))
        throw error(errc::zero_data_delta, "interval " + pair.lo.method + "/" + pair.lo.dataset +
                                               ": zero data delta");
    const double ds = pair.score_delta(score_key);
    const double dt = pair.time_delta();

    AbsoluteEfficiency out;
    out.score_key = score_key;
    out.sigma_abs = ds / dd;
    out.theta_abs = dt / dd;
    if (dt != 0.0) out.e_abs = ds / dt;
    return out;
}

/// Relative counterpart, in percent. Requires a strictly positive base score
/// on the lower run; epsilon is absent when theta is zero (the comparison
/// scheme proceeds on sigma alone, reports render a dash).
inline RelativeEfficiency relative_efficiency(const IntervalPair& pair,
                                              const std::string& score_key) {
    const double dd = static_cast<double>(pair.data_delta());
    if (!(dd > 0.0))
        throw error(errc::zero_data_delta, "interval " + pair.lo.method + "/" + pair.lo.dataset +
                                               ": zero data delta");
    const double s_lo = IntervalPair::score_of(pair.lo, score_key);
    const double s_hi = IntervalPair::score_of(pair.hi, score_key);
    if (!(s_lo > 0.0))
        throw error(errc::non_positive_base_score,
                    "interval " + pair.lo.method + "/" + pair.lo.dataset + " " +
                        std::to_string(pair.index) + "->" + std::to_string(pair.index + 1) +
                        ": base score for '" + score_key + "' must be > 0, got " +
                        std::to_string(s_lo));

    const double rel_data = dd / static_cast<double>(pair.lo.train_size);
    const double rel_score = (s_hi - s_lo) / s_lo;
    const double rel_time = pair.time_delta() / pair.lo.train_time_s;

    RelativeEfficiency out;
    out.score_key = score_key;
    out.sigma = 100.0 * rel_score / rel_data;
    out.theta = 100.0 * rel_time / rel_data;
    if (out.theta != 0.0) out.epsilon = out.sigma / out.theta;
    return out;
}

/// One (interval, score key) cell of a series' efficiency table.
struct EfficiencyEntry {
    int interval = 0;  // 1-based
    std::string score_key;
    AbsoluteEfficiency absolute;
    RelativeEfficiency relative;

    friend bool operator==(const EfficiencyEntry&, const EfficiencyEntry&) = default;
};

/// All efficiency entries of one method series, plus the ids needed to label
/// report rows.
struct SeriesEfficiency {
    std::string method;
    std::string dataset;
    int run_count = 0;
    std::vector<EfficiencyEntry> entries;  // interval-major, score keys sorted

    friend bool operator==(const SeriesEfficiency&, const SeriesEfficiency&) = default;
};

/// Computes absolute and relative metrics for every adjacent interval and
/// every score key: exactly (n-1) * |score_keys| entries, ordered by interval
/// index then score key.
inline SeriesEfficiency series_efficiency(const MethodSeries& series) {
    if (series.run_count() < 2)
        throw error(errc::series_too_short,
                    "method series " + series.method() + "/" + series.dataset() +
                        ": need at least 2 runs to form an interval, got " +
                        std::to_string(series.run_count()));

    SeriesEfficiency out;
    out.method = series.method();
    out.dataset = series.dataset();
    out.run_count = series.run_count();
    out.entries.reserve(static_cast<std::size_t>(series.interval_count()) *
                        series.score_keys().size());
    for (int i = 1; i <= series.interval_count(); ++i) {
        const IntervalPair pair = series.interval(i);
        for (const std::string& key : series.score_keys()) {
            EfficiencyEntry entry;
            entry.interval = i;
            entry.score_key = key;
            entry.absolute = absolute_efficiency(pair, key);
            entry.relative = relative_efficiency(pair, key);
            out.entries.push_back(std::move(entry));
        }
    }
    return out;
}

}  // namespace effbench
