#pragma once

// The multi-split evaluation scheme: which intervals to report, and the
// A-vs-B comparison. Final scores are checked first; when they are similar
// the rightmost sigma values decide which method will probably reach higher
// scores on a bigger training set. All interval sigma pairs are attached as
// evidence but only the rightmost interval is weighed.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "effbench/core.hpp"
#include "effbench/metrics.hpp"

namespace effbench {

/// Interval indices worth reporting for a series of n_runs runs.
/// All: every interval 1..n-1. Dispersed: leftmost, middle and rightmost,
/// deduplicated (middle is floor(n/2) clamped into [1, n-1]).
inline std::vector<int> select_report_intervals(int n_runs, IntervalSelection mode) {
    if (n_runs < 2)
        throw error(errc::series_too_short, "need at least 2 runs to form an interval, got " +
                                                std::to_string(n_runs));
    const int last = n_runs - 1;
    if (mode == IntervalSelection::All) {
        std::vector<int> all(static_cast<std::size_t>(last));
        for (int i = 0; i < last; ++i) all[static_cast<std::size_t>(i)] = i + 1;
        return all;
    }
    const int middle = std::clamp(n_runs / 2, 1, last);
    std::vector<int> picks = {1, middle, last};
    std::sort(picks.begin(), picks.end());
    picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
    return picks;
}

namespace detail {

inline std::vector<double> interval_sigmas(const MethodSeries& series, const std::string& key) {
    std::vector<double> sigmas;
    sigmas.reserve(static_cast<std::size_t>(series.interval_count()));
    for (int i = 1; i <= series.interval_count(); ++i)
        sigmas.push_back(relative_efficiency(series.interval(i), key).sigma);
    return sigmas;
}

}  // namespace detail

/// Compares two methods trained on the same dataset splits for one score key.
///
/// Let g be the relative gap of the final scores. If g exceeds
/// config.similarity_threshold one method is distinctly better. Otherwise the
/// rightmost sigma values are contrasted: a relative difference beyond
/// config.sigma_margin suggests the method with the larger sigma will scale
/// better with more data; anything less is inconclusive. Equal final scores
/// with equal sigma values on every interval is a tie.
inline ComparisonVerdict compare_methods(const MethodSeries& a, const MethodSeries& b,
                                         const std::string& score_key,
                                         const SchemeConfig& config = {}) {
    config.validate();
    if (a.dataset() != b.dataset())
        throw error(errc::mismatched_series, "cannot compare " + a.method() + " on " +
                                                 a.dataset() + " with " + b.method() + " on " +
                                                 b.dataset());
    if (a.run_count() != b.run_count())
        throw error(errc::mismatched_series,
                    "cannot compare " + a.method() + " (" + std::to_string(a.run_count()) +
                        " runs) with " + b.method() + " (" + std::to_string(b.run_count()) +
                        " runs)");
    if (a.run_count() < 2)
        throw error(errc::series_too_short, "comparison needs at least 2 runs per series, got " +
                                                std::to_string(a.run_count()));
    for (int i = 0; i < a.run_count(); ++i) {
        const double da = static_cast<double>(a.runs()[static_cast<std::size_t>(i)].train_size);
        const double db = static_cast<double>(b.runs()[static_cast<std::size_t>(i)].train_size);
        if (std::abs(da - db) / std::max(da, db) > 0.01)
            throw error(errc::mismatched_series,
                        "split sizes of " + a.method() + " and " + b.method() + " differ by more "
                        "than 1% at split " + std::to_string(i + 1));
    }
    for (const MethodSeries* series : {&a, &b}) {
        if (!series->has_score_key(score_key))
            throw error(errc::unknown_score_key,
                        "method " + series->method() + " carries no score key '" + score_key + "'");
        for (const RunRecord& run : series->runs())
            if (!(run.scores.at(score_key) > 0.0))
                throw error(errc::non_positive_base_score,
                            "method " + series->method() + " split " +
                                std::to_string(run.split_index) + ": score '" + score_key +
                                "' must be > 0 for relative comparison");
    }

    const std::vector<double> sig_a = detail::interval_sigmas(a, score_key);
    const std::vector<double> sig_b = detail::interval_sigmas(b, score_key);

    ComparisonVerdict out;
    out.method_a = a.method();
    out.method_b = b.method();
    out.dataset = a.dataset();
    out.score_key = score_key;
    out.final_score_a = a.runs().back().scores.at(score_key);
    out.final_score_b = b.runs().back().scores.at(score_key);
    out.rightmost_sigma_a = sig_a.back();
    out.rightmost_sigma_b = sig_b.back();
    for (std::size_t i = 0; i < sig_a.size(); ++i)
        out.evidence.push_back({static_cast<int>(i) + 1, sig_a[i], sig_b[i]});

    out.relative_gap = std::abs(out.final_score_a - out.final_score_b) /
                       std::max(out.final_score_a, out.final_score_b);

    const bool identical = out.final_score_a == out.final_score_b &&
                           std::equal(sig_a.begin(), sig_a.end(), sig_b.begin(),
                                      [](double x, double y) { return x == y; });
    if (identical) {
        out.verdict = Verdict::Tie;
        return out;
    }
    if (out.relative_gap > config.similarity_threshold) {
        out.verdict = out.final_score_a > out.final_score_b ? Verdict::ADistinctlyBetter
                                                            : Verdict::BDistinctlyBetter;
        return out;
    }
    const double denom = std::max(std::abs(out.rightmost_sigma_a), std::abs(out.rightmost_sigma_b));
    const double margin =
        denom == 0.0 ? 0.0 : std::abs(out.rightmost_sigma_a - out.rightmost_sigma_b) / denom;
    if (margin > config.sigma_margin)
        out.verdict = out.rightmost_sigma_a > out.rightmost_sigma_b
                          ? Verdict::SimilarALikelyScales
                          : Verdict::SimilarBLikelyScales;
    else
        out.verdict = Verdict::SimilarInconclusive;
    return out;
}

}  // namespace effbench
