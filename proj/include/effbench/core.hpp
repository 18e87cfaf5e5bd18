#pragma once

// Core value types for the data-efficiency benchmark harness: training-run
// observations, per-method series, adjacent-interval pairs and the efficiency
// triples computed over them. All types are immutable value types once
// constructed and safe to share across threads.

#include <algorithm>
#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace effbench {

enum class errc {
    invalid_record,
    non_consecutive_splits,
    non_increasing_train_size,
    heterogeneous_score_keys,
    unknown_score_key,
    zero_data_delta,
    non_positive_base_score,
    series_too_short,
    mismatched_series,
    mismatched_datasets,
    header_mismatch,
    bad_field_count,
    unparsable_number,
    conflicting_duplicate,
    inconsistent_split_meta,
    malformed_document,
    missing_field,
    wrong_type,
    empty_input,
    invalid_spec,
    invalid_config,
    unknown_method,
    unknown_dataset,
};

/// Library-wide exception. Carries a machine-checkable code plus a message
/// that names the offending line, field or series.
class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

/// Scores keyed by score key (e.g. "R1"); ordered so iteration order is
/// deterministic everywhere downstream.
using ScoreMap = std::map<std::string, double>;

/// One trained model's observation: a method trained on the split_index-th
/// data split of `train_size` samples took `train_time_s` seconds to converge
/// and obtained `scores` on the fixed test set.
struct RunRecord {
    std::string method;
    std::string dataset;
    int split_index = 0;        // 1-based
    long long train_size = 0;   // number of training samples
    double train_time_s = 0.0;  // wall-clock seconds until convergence
    ScoreMap scores;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;

    void validate() const {
        if (method.empty() || dataset.empty())
            throw error(errc::invalid_record, "run record: empty method or dataset id");
        if (split_index < 1)
            throw error(errc::invalid_record, "run " + method + "/" + dataset +
                                                  ": split_index must be >= 1, got " +
                                                  std::to_string(split_index));
        if (train_size < 1)
            throw error(errc::invalid_record, "run " + method + "/" + dataset + " split " +
                                                  std::to_string(split_index) +
                                                  ": train_size must be >= 1");
        if (!(train_time_s > 0.0))
            throw error(errc::invalid_record, "run " + method + "/" + dataset + " split " +
                                                  std::to_string(split_index) +
                                                  ": train_time_s must be > 0");
        if (scores.empty())
            throw error(errc::invalid_record, "run " + method + "/" + dataset + " split " +
                                                  std::to_string(split_index) +
                                                  ": scores map is empty");
    }
};

namespace detail {

inline std::vector<std::string> sorted_keys(const ScoreMap& scores) {
    std::vector<std::string> keys;
    keys.reserve(scores.size());
    for (const auto& [key, value] : scores) keys.push_back(key);
    return keys;  // std::map iterates in sorted order
}

/// Shortest representation that parses back to the identical double.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Two adjacent runs of the same series. Houses the increments the metrics
/// are formed from: data_delta, time_delta and score_delta per key.
struct IntervalPair {
    RunRecord lo;
    RunRecord hi;
    int index = 0;  // 1-based, equals lo.split_index

    IntervalPair(RunRecord lo_run, RunRecord hi_run)
        : lo(std::move(lo_run)), hi(std::move(hi_run)), index(lo.split_index) {
        lo.validate();
        hi.validate();
        if (lo.method != hi.method || lo.dataset != hi.dataset)
            throw error(errc::mismatched_series,
                        "interval pair: runs belong to different series (" + lo.method + "/" +
                            lo.dataset + " vs " + hi.method + "/" + hi.dataset + ")");
        if (hi.train_size <= lo.train_size)
            throw error(errc::zero_data_delta,
                        "interval pair " + lo.method + "/" + lo.dataset +
                            ": upper run must have strictly larger train_size (" +
                            std::to_string(lo.train_size) + " -> " + std::to_string(hi.train_size) +
                            ")");
        if (detail::sorted_keys(lo.scores) != detail::sorted_keys(hi.scores))
            throw error(errc::heterogeneous_score_keys,
                        "interval pair " + lo.method + "/" + lo.dataset +
                            ": runs carry different score key sets");
    }

    long long data_delta() const noexcept { return hi.train_size - lo.train_size; }
    double time_delta() const noexcept { return hi.train_time_s - lo.train_time_s; }

    double score_delta(const std::string& key) const {
        return score_of(hi, key) - score_of(lo, key);
    }

    static double score_of(const RunRecord& run, const std::string& key) {
        auto it = run.scores.find(key);
        if (it == run.scores.end())
            throw error(errc::unknown_score_key, "run " + run.method + "/" + run.dataset +
                                                     " split " + std::to_string(run.split_index) +
                                                     ": unknown score key '" + key + "'");
        return it->second;
    }
};

/// Ordered runs of one method on one dataset, sorted by split index.
/// Construction sorts and validates, so any permutation of the same records
/// yields an identical series. A series of length 1 is valid here; efficiency
/// computations additionally require length >= 2.
///
/// Assumed but not checked: splits are nested prefixes of one shuffled
/// dataset (homogeneous sample quality across intervals), and train_time_s is
/// the time until converged scores. Both are the data producer's job.
class MethodSeries {
public:
    explicit MethodSeries(std::vector<RunRecord> runs) : runs_(std::move(runs)) {
        if (runs_.empty())
            throw error(errc::invalid_record, "method series: no runs");
        for (const RunRecord& run : runs_) run.validate();
        const std::string& method = runs_.front().method;
        const std::string& dataset = runs_.front().dataset;
        for (const RunRecord& run : runs_)
            if (run.method != method || run.dataset != dataset)
                throw error(errc::mismatched_series,
                            "method series " + method + "/" + dataset +
                                ": mixed with records of " + run.method + "/" + run.dataset);
        std::sort(runs_.begin(), runs_.end(), [](const RunRecord& a, const RunRecord& b) {
            return a.split_index < b.split_index;
        });
        for (std::size_t i = 0; i < runs_.size(); ++i) {
            if (runs_[i].split_index != static_cast<int>(i) + 1)
                throw error(errc::non_consecutive_splits,
                            "method series " + method + "/" + dataset +
                                ": split indices must be consecutive from 1, got " +
                                std::to_string(runs_[i].split_index) + " at position " +
                                std::to_string(i + 1));
            if (i > 0 && runs_[i].train_size <= runs_[i - 1].train_size)
                throw error(errc::non_increasing_train_size,
                            "method series " + method + "/" + dataset +
                                ": train_size must strictly increase with split_index (split " +
                                std::to_string(runs_[i].split_index) + ")");
        }
        keys_ = detail::sorted_keys(runs_.front().scores);
        for (const RunRecord& run : runs_)
            if (detail::sorted_keys(run.scores) != keys_)
                throw error(errc::heterogeneous_score_keys,
                            "method series " + method + "/" + dataset +
                                ": runs carry different score key sets (split " +
                                std::to_string(run.split_index) + ")");
    }

    const std::string& method() const noexcept { return runs_.front().method; }
    const std::string& dataset() const noexcept { return runs_.front().dataset; }
    const std::vector<RunRecord>& runs() const noexcept { return runs_; }
    const std::vector<std::string>& score_keys() const noexcept { return keys_; }

    int run_count() const noexcept { return static_cast<int>(runs_.size()); }
    int interval_count() const noexcept { return run_count() - 1; }

    bool has_score_key(const std::string& key) const noexcept {
        return std::find(keys_.begin(), keys_.end(), key) != keys_.end();
    }

    /// 1-based interval index: interval i spans runs i and i+1.
    IntervalPair interval(int index) const {
        if (index < 1 || index > interval_count())
            throw error(errc::series_too_short,
                        "method series " + method() + "/" + dataset() + ": no interval " +
                            std::to_string(index) + " (runs: " + std::to_string(run_count()) + ")");
        return IntervalPair(runs_[static_cast<std::size_t>(index) - 1],
                            runs_[static_cast<std::size_t>(index)]);
    }

    friend bool operator==(const MethodSeries& a, const MethodSeries& b) {
        return a.runs_ == b.runs_;
    }

private:
    std::vector<RunRecord> runs_;
    std::vector<std::string> keys_;
};

/// Absolute efficiency triple over one interval: Sigma = score gain per
/// additional sample, Theta = extra seconds per additional sample, E = score
/// gain per extra second (absent when the time delta is zero).
struct AbsoluteEfficiency {
    std::string score_key;
    double sigma_abs = 0.0;
    double theta_abs = 0.0;
    std::optional<double> e_abs;

    friend bool operator==(const AbsoluteEfficiency&, const AbsoluteEfficiency&) = default;
};

/// Relative efficiency triple over one interval, formed from the relative
/// increments with the lower run as base. sigma and theta are in percent,
/// epsilon is their ratio (absent when theta is zero).
struct RelativeEfficiency {
    std::string score_key;
    double sigma = 0.0;
    double theta = 0.0;
    std::optional<double> epsilon;

    friend bool operator==(const RelativeEfficiency&, const RelativeEfficiency&) = default;
};

enum class IntervalSelection { All, Dispersed };

/// Thresholds of the comparison scheme. There is no canonical cutoff for
/// "distinctly higher" final scores or a "significant" rightmost-sigma gap;
/// these defaults are this harness' choice and are configurable.
struct SchemeConfig {
    double similarity_threshold = 0.02;  // relative final-score gap counting as "similar"
    double sigma_margin = 0.10;          // relative rightmost-sigma gap counting as significant
    IntervalSelection reported_intervals = IntervalSelection::Dispersed;

    void validate() const {
        if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
            throw error(errc::invalid_config, "similarity_threshold must be in (0,1)");
        if (!(sigma_margin > 0.0 && sigma_margin < 1.0))
            throw error(errc::invalid_config, "sigma_margin must be in (0,1)");
    }
};

enum class Verdict {
    ADistinctlyBetter,
    BDistinctlyBetter,
    SimilarALikelyScales,
    SimilarBLikelyScales,
    SimilarInconclusive,
    Tie,
};

inline const char* to_string(Verdict verdict) noexcept {
    switch (verdict) {
        case Verdict::ADistinctlyBetter: return "A_DISTINCTLY_BETTER";
        case Verdict::BDistinctlyBetter: return "B_DISTINCTLY_BETTER";
        case Verdict::SimilarALikelyScales: return "SIMILAR_A_LIKELY_SCALES";
        case Verdict::SimilarBLikelyScales: return "SIMILAR_B_LIKELY_SCALES";
        case Verdict::SimilarInconclusive: return "SIMILAR_INCONCLUSIVE";
        case Verdict::Tie: return "TIE";
    }
    return "UNKNOWN";
}

inline std::optional<Verdict> verdict_from_string(const std::string& name) noexcept {
    for (Verdict v : {Verdict::ADistinctlyBetter, Verdict::BDistinctlyBetter,
                      Verdict::SimilarALikelyScales, Verdict::SimilarBLikelyScales,
                      Verdict::SimilarInconclusive, Verdict::Tie})
        if (name == to_string(v)) return v;
    return std::nullopt;
}

/// Per-interval sigma pair attached to a comparison as supporting evidence.
struct SigmaEvidence {
    int interval = 0;
    double sigma_a = 0.0;
    double sigma_b = 0.0;

    friend bool operator==(const SigmaEvidence&, const SigmaEvidence&) = default;
};

/// Outcome of comparing two methods on one score key: final scores first,
/// rightmost sigma values as the tie breaker, all interval sigma pairs as
/// evidence. The verdict is a pure function of final scores, sigma evidence
/// and the configured thresholds.
struct ComparisonVerdict {
    std::string method_a;
    std::string method_b;
    std::string dataset;
    std::string score_key;
    double final_score_a = 0.0;
    double final_score_b = 0.0;
    double relative_gap = 0.0;  // |s_a - s_b| / max(s_a, s_b)
    double rightmost_sigma_a = 0.0;
    double rightmost_sigma_b = 0.0;
    Verdict verdict = Verdict::SimilarInconclusive;
    std::vector<SigmaEvidence> evidence;

    friend bool operator==(const ComparisonVerdict&, const ComparisonVerdict&) = default;
};

}  // namespace effbench
