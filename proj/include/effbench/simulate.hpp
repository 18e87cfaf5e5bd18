#pragma once

// Synthetic series generation from parametric learning curves, plus an
// extended-precision oracle for the metric computations.
//
// The score curve is a saturating power law s(d) = a - b*d^(-c), the time
// curve t(d) = p*d^q. Optional score noise is uniform with a bounded
// half-width, drawn from a SplitMix64 stream, so fixtures can guarantee
// monotone scores by keeping the half-width under half the smallest
// inter-split score gap.
//
// The oracle evaluates the metric quotients in exact rational arithmetic over
// the binary values of its inputs and rounds to double once at the end; the
// working-precision path is checked against it to 1e-9 relative.

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "effbench/core.hpp"
#include "effbench/metrics.hpp"

namespace effbench {

/// SplitMix64 (Steele et al.), the fixture generator: 64-bit state, fixed
/// constants, identical output on every platform.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 bits.
    double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in [lo, hi].
    double next_in(double lo, double hi) noexcept { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

struct ScoreModel {
    double a = 0.0;  // asymptote
    double b = 0.0;  // deficit scale
    double c = 0.0;  // saturation rate

    double operator()(double d) const { return a - b * std::pow(d, -c); }
};

struct TimeModel {
    double p = 0.0;
    double q = 0.0;

    double operator()(double d) const { return p * std::pow(d, q); }
};

struct CurveSpec {
    std::string method = "SIM";
    std::string dataset = "SYNTH";
    std::string score_key = "S";
    ScoreModel score_model;
    TimeModel time_model;
    std::vector<long long> splits;
    double noise = 0.0;  // uniform half-width applied to scores

    void validate() const {
        if (method.empty() || dataset.empty() || score_key.empty())
            throw error(errc::invalid_spec, "curve spec: empty method, dataset or score_key");
        if (!(score_model.a > 0.0 && score_model.b > 0.0 && score_model.c > 0.0))
            throw error(errc::invalid_spec, "curve spec: score model needs a, b, c > 0");
        if (!(time_model.p > 0.0 && time_model.q > 0.0))
            throw error(errc::invalid_spec, "curve spec: time model needs p, q > 0");
        if (splits.empty()) throw error(errc::invalid_spec, "curve spec: no splits");
        long long prev = 0;
        for (long long split : splits) {
            if (split <= prev)
                throw error(errc::invalid_spec,
                            "curve spec: splits must be increasing positive integers");
            prev = split;
        }
        if (!(noise >= 0.0)) throw error(errc::invalid_spec, "curve spec: noise must be >= 0");
        for (long long split : splits) {
            const double d = static_cast<double>(split);
            if (!(score_model(d) - noise > 0.0))
                throw error(errc::invalid_spec, "curve spec: score at split " +
                                                    std::to_string(split) +
                                                    " is not positive after worst-case noise");
            if (!std::isfinite(time_model(d)))
                throw error(errc::invalid_spec,
                            "curve spec: time overflows at split " + std::to_string(split));
        }
    }
};

/// One run per split, deterministic for a fixed seed.
inline MethodSeries generate_series(const CurveSpec& spec, std::uint64_t seed) {
    spec.validate();
    SplitMix64 rng(seed);
    std::vector<RunRecord> runs;
    runs.reserve(spec.splits.size());
    for (std::size_t i = 0; i < spec.splits.size(); ++i) {
        const double d = static_cast<double>(spec.splits[i]);
        RunRecord run;
        run.method = spec.method;
        run.dataset = spec.dataset;
        run.split_index = static_cast<int>(i) + 1;
        run.train_size = spec.splits[i];
        run.train_time_s = spec.time_model(d);
        double score = spec.score_model(d);
        if (spec.noise > 0.0) score += rng.next_in(-spec.noise, spec.noise);
        run.scores[spec.score_key] = score;
        runs.push_back(std::move(run));
    }
    return MethodSeries(std::move(runs));
}

/// Curve specs from a structured document: one object or an array of them.
inline std::vector<CurveSpec> parse_curve_specs(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw error(errc::malformed_document, std::string("curve spec: ") + ex.what());
    }
    if (doc.is_object()) doc = nlohmann::json::array({doc});
    if (!doc.is_array())
        throw error(errc::malformed_document, "curve spec: expected an object or an array");

    std::vector<CurveSpec> specs;
    std::size_t pos = 0;
    for (const nlohmann::json& obj : doc) {
        const std::string where = "curve spec " + std::to_string(pos++);
        if (!obj.is_object()) throw error(errc::wrong_type, where + ": not an object");
        auto field = [&](const nlohmann::json& node, const char* name) -> const nlohmann::json& {
            auto it = node.find(name);
            if (it == node.end())
                throw error(errc::missing_field, where + ": missing field '" + name + "'");
            return *it;
        };
        try {
            CurveSpec spec;
            spec.method = field(obj, "method").get<std::string>();
            spec.dataset = field(obj, "dataset").get<std::string>();
            spec.score_key = field(obj, "score_key").get<std::string>();
            const nlohmann::json& sm = field(obj, "score_model");
            spec.score_model = {field(sm, "a").get<double>(), field(sm, "b").get<double>(),
                                field(sm, "c").get<double>()};
            const nlohmann::json& tm = field(obj, "time_model");
            spec.time_model = {field(tm, "p").get<double>(), field(tm, "q").get<double>()};
            spec.splits = field(obj, "splits").get<std::vector<long long>>();
            if (auto it = obj.find("noise"); it != obj.end()) spec.noise = it->get<double>();
            spec.validate();
            specs.push_back(std::move(spec));
        } catch (const nlohmann::json::exception& ex) {
            throw error(errc::wrong_type, where + ": " + ex.what());
        }
    }
    return specs;
}

namespace oracle_detail {

using Rational = boost::multiprecision::cpp_rational;

/// Rational -> double through a 50-digit binary float, so the only meaningful
/// rounding step is the final one to double.
inline double to_double(const Rational& value) {
    return static_cast<double>(static_cast<boost::multiprecision::cpp_bin_float_50>(value));
}

}  // namespace oracle_detail

/// absolute_efficiency recomputed in exact rational arithmetic.
inline AbsoluteEfficiency oracle_absolute_efficiency(const IntervalPair& pair,
                                                     const std::string& score_key) {
    using oracle_detail::Rational;
    const Rational ds = Rational(IntervalPair::score_of(pair.hi, score_key)) -
                        Rational(IntervalPair::score_of(pair.lo, score_key));
    const Rational dt = Rational(pair.hi.train_time_s) - Rational(pair.lo.train_time_s);
    const Rational dd(pair.data_delta());

    AbsoluteEfficiency out;
    out.score_key = score_key;
    out.sigma_abs = oracle_detail::to_double(ds / dd);
    out.theta_abs = oracle_detail::to_double(dt / dd);
    if (dt != 0) out.e_abs = oracle_detail::to_double(ds / dt);
    return out;
}

/// relative_efficiency recomputed in exact rational arithmetic.
inline RelativeEfficiency oracle_relative_efficiency(const IntervalPair& pair,
                                                     const std::string& score_key) {
    using oracle_detail::Rational;
    const double s_lo_d = IntervalPair::score_of(pair.lo, score_key);
    if (!(s_lo_d > 0.0))
        throw error(errc::non_positive_base_score,
                    "oracle: base score for '" + score_key + "' must be > 0");
    const Rational s_lo(s_lo_d);
    const Rational ds = Rational(IntervalPair::score_of(pair.hi, score_key)) - s_lo;
    const Rational t_lo(pair.lo.train_time_s);
    const Rational dt = Rational(pair.hi.train_time_s) - t_lo;
    const Rational d_lo(pair.lo.train_size);
    const Rational dd(pair.data_delta());

    const Rational rel_data = dd / d_lo;
    const Rational sigma = 100 * (ds / s_lo) / rel_data;
    const Rational theta = 100 * (dt / t_lo) / rel_data;

    RelativeEfficiency out;
    out.score_key = score_key;
    out.sigma = oracle_detail::to_double(sigma);
    out.theta = oracle_detail::to_double(theta);
    if (theta != 0) out.epsilon = oracle_detail::to_double(sigma / theta);
    return out;
}

}  // namespace effbench
