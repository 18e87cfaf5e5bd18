#pragma once

// Renderers for score tables, efficiency tables, trend plot data and
// comparison verdicts. Markdown applies the display rounding policy (sigma
// and theta to 2 decimals, epsilon to 3, scores to 2, half away from zero);
// delimited and structured outputs always carry full precision. All output
// is deterministic for identical inputs.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "effbench/core.hpp"
#include "effbench/ingest.hpp"
#include "effbench/metrics.hpp"

namespace effbench {

enum class TableFormat { Markdown, Delimited, Structured };
enum class EfficiencyKind { Relative, Absolute };
enum class VerdictFormat { Text, Structured };

namespace detail {

/// Fixed decimals, round half away from zero.
inline std::string format_fixed(double value, int digits) {
    const double scale = std::pow(10.0, digits);
    double rounded = std::round(value * scale) / scale;
    if (rounded == 0.0) rounded = 0.0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, rounded);
    return buf;
}

/// Compact significant-digit form for absolute metrics, whose magnitudes
/// range from 1e-6 to 1e2 in practice.
inline std::string format_compact(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.5g", value);
    return buf;
}

using Cells = std::vector<std::string>;

inline std::string markdown_table(const Cells& header, const std::vector<Cells>& rows) {
    auto emit_row = [](const Cells& cells) {
        std::string line = "|";
        for (const std::string& cell : cells) {
            line += ' ';
            line += cell;
            line += " |";
        }
        line += '\n';
        return line;
    };
    std::string out = emit_row(header);
    out += "|";
    for (std::size_t i = 0; i < header.size(); ++i) out += "---|";
    out += '\n';
    for (const Cells& row : rows) out += emit_row(row);
    return out;
}

inline std::string delimited_table(const Cells& header, const std::vector<Cells>& rows) {
    auto emit_row = [](const Cells& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    };
    std::string out = emit_row(header);
    for (const Cells& row : rows) out += emit_row(row);
    return out;
}

inline std::vector<std::string> union_score_keys(std::span<const SeriesEfficiency> metrics) {
    std::set<std::string> keys;
    for (const SeriesEfficiency& m : metrics)
        for (const EfficiencyEntry& e : m.entries) keys.insert(e.score_key);
    return {keys.begin(), keys.end()};
}

}  // namespace detail

/// One row per run, score columns then training time, reproducing the score
/// table shape of a results section. Structured output is the ingest schema
/// and re-ingests to identical series.
inline std::string render_score_table(std::span<const MethodSeries> series, TableFormat format) {
    if (series.empty()) throw error(errc::empty_input, "score table: no series");

    if (format == TableFormat::Structured) {
        std::vector<RunRecord> runs;
        for (const MethodSeries& s : series)
            runs.insert(runs.end(), s.runs().begin(), s.runs().end());
        return write_runs_structured(runs);
    }

    std::set<std::string> key_union;
    std::set<std::string> datasets;
    for (const MethodSeries& s : series) {
        key_union.insert(s.score_keys().begin(), s.score_keys().end());
        datasets.insert(s.dataset());
    }
    const std::vector<std::string> keys(key_union.begin(), key_union.end());

    if (format == TableFormat::Delimited) {
        detail::Cells header = {"method", "dataset", "split_index", "train_size"};
        for (const std::string& key : keys) header.push_back(key);
        header.push_back("train_time_s");
        std::vector<detail::Cells> rows;
        for (const MethodSeries& s : series)
            for (const RunRecord& run : s.runs()) {
                detail::Cells row = {run.method, run.dataset, std::to_string(run.split_index),
                                     std::to_string(run.train_size)};
                for (const std::string& key : keys) {
                    auto it = run.scores.find(key);
                    row.push_back(it == run.scores.end() ? ""
                                                         : detail::format_double(it->second));
                }
                row.push_back(detail::format_double(run.train_time_s));
                rows.push_back(std::move(row));
            }
        return detail::delimited_table(header, rows);
    }

    // Markdown: one table per dataset, labeled only when several are present.
    detail::Cells header = {"model"};
    for (const std::string& key : keys) header.push_back(key);
    header.push_back("train_time_s");

    std::string out;
    bool first_group = true;
    for (const std::string& dataset : datasets) {
        std::vector<detail::Cells> rows;
        for (const MethodSeries& s : series) {
            if (s.dataset() != dataset) continue;
            for (const RunRecord& run : s.runs()) {
                detail::Cells row = {run.method + std::to_string(run.split_index)};
                for (const std::string& key : keys) {
                    auto it = run.scores.find(key);
                    row.push_back(it == run.scores.end() ? "--"
                                                         : detail::format_fixed(it->second, 2));
                }
                row.push_back(detail::format_double(run.train_time_s));
                rows.push_back(std::move(row));
            }
        }
        if (!first_group) out += '\n';
        if (datasets.size() > 1) out += "dataset: " + dataset + "\n\n";
        out += detail::markdown_table(header, rows);
        first_group = false;
    }
    return out;
}

/// Structured form of the efficiency table: one object per (method, interval)
/// with per-key sigma/epsilon maps (absent epsilon is null).
inline nlohmann::json efficiency_to_json(std::span<const SeriesEfficiency> metrics,
                                         EfficiencyKind kind = EfficiencyKind::Relative) {
    const bool relative = kind == EfficiencyKind::Relative;
    const std::string sigma_name = relative ? "sigma" : "sigma_abs";
    const std::string theta_name = relative ? "theta" : "theta_abs";
    const std::string eps_name = relative ? "epsilon" : "e_abs";

    nlohmann::json doc = nlohmann::json::array();
    for (const SeriesEfficiency& m : metrics) {
        std::map<int, std::vector<const EfficiencyEntry*>> per_interval;
        for (const EfficiencyEntry& e : m.entries) per_interval[e.interval].push_back(&e);
        for (const auto& [interval, entries] : per_interval) {
            nlohmann::json obj;
            obj["model"] = m.method + std::to_string(interval) + std::to_string(interval + 1);
            obj["method"] = m.method;
            obj["dataset"] = m.dataset;
            obj["interval"] = interval;
            nlohmann::json sigma = nlohmann::json::object();
            nlohmann::json eps = nlohmann::json::object();
            for (const EfficiencyEntry* e : entries) {
                if (relative) {
                    sigma[e->score_key] = e->relative.sigma;
                    eps[e->score_key] = e->relative.epsilon ? nlohmann::json(*e->relative.epsilon)
                                                            : nlohmann::json(nullptr);
                } else {
                    sigma[e->score_key] = e->absolute.sigma_abs;
                    eps[e->score_key] = e->absolute.e_abs ? nlohmann::json(*e->absolute.e_abs)
                                                          : nlohmann::json(nullptr);
                }
            }
            obj[sigma_name] = std::move(sigma);
            obj[theta_name] = relative ? entries.front()->relative.theta
                                       : entries.front()->absolute.theta_abs;
            obj[eps_name] = std::move(eps);
            doc.push_back(std::move(obj));
        }
    }
    return doc;
}

/// One row per (method, interval): sigma per score key, theta, epsilon per
/// score key (or their absolute counterparts). Row labels concatenate the
/// method with the interval endpoints, e.g. "ABS12".
inline std::string render_efficiency_table(std::span<const SeriesEfficiency> metrics,
                                           TableFormat format,
                                           EfficiencyKind kind = EfficiencyKind::Relative) {
    if (metrics.empty()) throw error(errc::empty_input, "efficiency table: no series metrics");
    bool any_entries = false;
    for (const SeriesEfficiency& m : metrics) any_entries |= !m.entries.empty();
    if (!any_entries) throw error(errc::empty_input, "efficiency table: no entries");

    if (format == TableFormat::Structured) return efficiency_to_json(metrics, kind).dump(2) + "\n";

    const std::vector<std::string> keys = detail::union_score_keys(metrics);
    const bool relative = kind == EfficiencyKind::Relative;
    const std::string sigma_name = relative ? "sigma" : "sigma_abs";
    const std::string theta_name = relative ? "theta" : "theta_abs";
    const std::string eps_name = relative ? "epsilon" : "e_abs";

    struct Row {
        std::string dataset;
        std::string method;
        int interval = 0;
        std::map<std::string, const EfficiencyEntry*> by_key;
    };
    std::vector<Row> rows;
    for (const SeriesEfficiency& m : metrics) {
        std::map<int, Row> per_interval;
        for (const EfficiencyEntry& e : m.entries) {
            Row& row = per_interval[e.interval];
            row.dataset = m.dataset;
            row.method = m.method;
            row.interval = e.interval;
            row.by_key[e.score_key] = &e;
        }
        for (auto& [interval, row] : per_interval) rows.push_back(std::move(row));
    }

    auto label = [](const Row& row) {
        return row.method + std::to_string(row.interval) + std::to_string(row.interval + 1);
    };
    auto theta_of = [relative](const Row& row) {
        const EfficiencyEntry* e = row.by_key.begin()->second;
        return relative ? e->relative.theta : e->absolute.theta_abs;
    };

    auto value_cells = [&](const Row& row, bool markdown) {
        detail::Cells cells;
        auto fmt_sigma = [&](double v) {
            if (!markdown) return detail::format_double(v);
            return relative ? detail::format_fixed(v, 2) : detail::format_compact(v);
        };
        auto fmt_eps = [&](double v) {
            if (!markdown) return detail::format_double(v);
            return relative ? detail::format_fixed(v, 3) : detail::format_compact(v);
        };
        const std::string absent = markdown ? "--" : "";
        for (const std::string& key : keys) {
            auto it = row.by_key.find(key);
            if (it == row.by_key.end()) {
                cells.push_back(absent);
                continue;
            }
            cells.push_back(
                fmt_sigma(relative ? it->second->relative.sigma : it->second->absolute.sigma_abs));
        }
        cells.push_back(fmt_sigma(theta_of(row)));
        for (const std::string& key : keys) {
            auto it = row.by_key.find(key);
            if (it == row.by_key.end()) {
                cells.push_back(absent);
                continue;
            }
            const auto& eps =
                relative ? it->second->relative.epsilon : it->second->absolute.e_abs;
            cells.push_back(eps ? fmt_eps(*eps) : absent);
        }
        return cells;
    };

    if (format == TableFormat::Delimited) {
        detail::Cells header = {"model", "method", "dataset", "interval"};
        for (const std::string& key : keys) header.push_back(sigma_name + "_" + key);
        header.push_back(theta_name);
        for (const std::string& key : keys) header.push_back(eps_name + "_" + key);
        std::vector<detail::Cells> out_rows;
        for (const Row& row : rows) {
            detail::Cells cells = {label(row), row.method, row.dataset,
                                   std::to_string(row.interval)};
            for (std::string& cell : value_cells(row, false)) cells.push_back(std::move(cell));
            out_rows.push_back(std::move(cells));
        }
        return detail::delimited_table(header, out_rows);
    }

    // Markdown, grouped by dataset like the score table.
    detail::Cells header = {"model"};
    for (const std::string& key : keys) header.push_back(sigma_name + "_" + key);
    header.push_back(theta_name);
    for (const std::string& key : keys) header.push_back(eps_name + "_" + key);

    std::set<std::string> datasets;
    for (const Row& row : rows) datasets.insert(row.dataset);
    std::string out;
    bool first_group = true;
    for (const std::string& dataset : datasets) {
        std::vector<detail::Cells> md_rows;
        for (const Row& row : rows) {
            if (row.dataset != dataset) continue;
            detail::Cells cells = {label(row)};
            for (std::string& cell : value_cells(row, true)) cells.push_back(std::move(cell));
            md_rows.push_back(std::move(cells));
        }
        if (!first_group) out += '\n';
        if (datasets.size() > 1) out += "dataset: " + dataset + "\n\n";
        out += detail::markdown_table(header, md_rows);
        first_group = false;
    }
    return out;
}

/// Tab-separated plot data: train_size column, then one score column per
/// method, one row per split index. Split sizes that differ across methods by
/// at most 1% are averaged per index (noted in a leading comment line);
/// larger disparities are an error. Missing splits render as empty cells.
inline std::string render_trend_data(std::span<const MethodSeries> series,
                                     const std::string& score_key) {
    if (series.empty()) throw error(errc::empty_input, "trend data: no series");
    const std::string& dataset = series.front().dataset();
    for (const MethodSeries& s : series) {
        if (s.dataset() != dataset)
            throw error(errc::mismatched_datasets, "trend data: series span datasets '" + dataset +
                                                       "' and '" + s.dataset() + "'");
        if (!s.has_score_key(score_key))
            throw error(errc::unknown_score_key, "trend data: method " + s.method() +
                                                     " carries no score key '" + score_key + "'");
    }

    int max_runs = 0;
    for (const MethodSeries& s : series) max_runs = std::max(max_runs, s.run_count());

    bool averaged = false;
    std::vector<double> sizes(static_cast<std::size_t>(max_runs));
    for (int split = 1; split <= max_runs; ++split) {
        double lo = 0.0, hi = 0.0, sum = 0.0;
        int count = 0;
        for (const MethodSeries& s : series) {
            if (split > s.run_count()) continue;
            const double size =
                static_cast<double>(s.runs()[static_cast<std::size_t>(split - 1)].train_size);
            if (count == 0) lo = hi = size;
            lo = std::min(lo, size);
            hi = std::max(hi, size);
            sum += size;
            ++count;
        }
        if ((hi - lo) / hi > 0.01)
            throw error(errc::mismatched_series,
                        "trend data: split " + std::to_string(split) +
                            " sizes differ across methods by more than 1%");
        if (lo != hi) averaged = true;
        sizes[static_cast<std::size_t>(split - 1)] = sum / count;
    }

    auto format_size = [](double size) {
        if (size == std::floor(size) && std::abs(size) < 9.007199254740992e15)
            return std::to_string(static_cast<long long>(size));
        return detail::format_double(size);
    };

    std::string out;
    if (averaged)
        out += "# train_size averaged across methods (per-split sizes differ by at most 1%)\n";
    out += "train_size";
    for (const MethodSeries& s : series) {
        out += '\t';
        out += s.method();
    }
    out += '\n';
    for (int split = 1; split <= max_runs; ++split) {
        out += format_size(sizes[static_cast<std::size_t>(split - 1)]);
        for (const MethodSeries& s : series) {
            out += '\t';
            if (split <= s.run_count())
                out += detail::format_double(
                    s.runs()[static_cast<std::size_t>(split - 1)].scores.at(score_key));
        }
        out += '\n';
    }
    return out;
}

inline nlohmann::json verdict_to_json(const ComparisonVerdict& verdict) {
    nlohmann::json doc;
    doc["method_a"] = verdict.method_a;
    doc["method_b"] = verdict.method_b;
    doc["dataset"] = verdict.dataset;
    doc["score_key"] = verdict.score_key;
    doc["final_score_a"] = verdict.final_score_a;
    doc["final_score_b"] = verdict.final_score_b;
    doc["relative_gap"] = verdict.relative_gap;
    doc["rightmost_sigma_a"] = verdict.rightmost_sigma_a;
    doc["rightmost_sigma_b"] = verdict.rightmost_sigma_b;
    doc["verdict"] = to_string(verdict.verdict);
    doc["evidence"] = nlohmann::json::array();
    for (const SigmaEvidence& e : verdict.evidence)
        doc["evidence"].push_back(
            {{"interval", e.interval}, {"sigma_a", e.sigma_a}, {"sigma_b", e.sigma_b}});
    return doc;
}

/// Text form mirrors the scheme's conclusion sentence and attaches the
/// per-interval sigma evidence; structured form carries every field.
inline std::string render_verdict(const ComparisonVerdict& verdict, VerdictFormat format) {
    if (format == VerdictFormat::Structured) return verdict_to_json(verdict).dump(2) + "\n";

    const std::string& a = verdict.method_a;
    const std::string& b = verdict.method_b;
    const std::string& d = verdict.dataset;
    std::string sentence;
    switch (verdict.verdict) {
        case Verdict::ADistinctlyBetter:
            sentence = a + " performs distinctly better than " + b + " on " + d + ".";
            break;
        case Verdict::BDistinctlyBetter:
            sentence = b + " performs distinctly better than " + a + " on " + d + ".";
            break;
        case Verdict::SimilarALikelyScales:
            sentence = a + " and " + b + " perform (almost) the same on " + d + ", but " + a +
                       " will probably perform better than " + b + " if trained on more data.";
            break;
        case Verdict::SimilarBLikelyScales:
            sentence = a + " and " + b + " perform (almost) the same on " + d + ", but " + b +
                       " will probably perform better than " + a + " if trained on more data.";
            break;
        case Verdict::SimilarInconclusive:
            sentence = a + " and " + b + " perform (almost) the same on " + d +
                       "; the rightmost sigma values do not differ significantly.";
            break;
        case Verdict::Tie:
            sentence = a + " and " + b + " have identical series on " + d + ".";
            break;
    }

    std::string out = "verdict: ";
    out += to_string(verdict.verdict);
    out += '\n';
    out += sentence;
    out += '\n';
    out += "final " + verdict.score_key + ": " + a + " " +
           detail::format_fixed(verdict.final_score_a, 2) + " vs " + b + " " +
           detail::format_fixed(verdict.final_score_b, 2) + " (relative gap " +
           detail::format_fixed(100.0 * verdict.relative_gap, 2) + "%)\n";
    out += "rightmost sigma: " + a + " " + detail::format_fixed(verdict.rightmost_sigma_a, 2) +
           " vs " + b + " " + detail::format_fixed(verdict.rightmost_sigma_b, 2) + "\n";
    out += '\n';
    detail::Cells header = {"interval", "sigma " + a, "sigma " + b};
    std::vector<detail::Cells> rows;
    for (const SigmaEvidence& e : verdict.evidence)
        rows.push_back({std::to_string(e.interval), detail::format_fixed(e.sigma_a, 2),
                        detail::format_fixed(e.sigma_b, 2)});
    out += detail::markdown_table(header, rows);
    return out;
}

/// Reads back the structured verdict form.
inline ComparisonVerdict parse_verdict_structured(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw error(errc::malformed_document, std::string("structured verdict: ") + ex.what());
    }
    auto field = [&doc](const char* name) -> const nlohmann::json& {
        auto it = doc.find(name);
        if (it == doc.end())
            throw error(errc::missing_field, std::string("structured verdict: missing field '") +
                                                 name + "'");
        return *it;
    };
    ComparisonVerdict verdict;
    verdict.method_a = field("method_a").get<std::string>();
    verdict.method_b = field("method_b").get<std::string>();
    verdict.dataset = field("dataset").get<std::string>();
    verdict.score_key = field("score_key").get<std::string>();
    verdict.final_score_a = field("final_score_a").get<double>();
    verdict.final_score_b = field("final_score_b").get<double>();
    verdict.relative_gap = field("relative_gap").get<double>();
    verdict.rightmost_sigma_a = field("rightmost_sigma_a").get<double>();
    verdict.rightmost_sigma_b = field("rightmost_sigma_b").get<double>();
    const auto parsed = verdict_from_string(field("verdict").get<std::string>());
    if (!parsed)
        throw error(errc::wrong_type, "structured verdict: unknown verdict name");
    verdict.verdict = *parsed;
    for (const nlohmann::json& e : field("evidence"))
        verdict.evidence.push_back({e.at("interval").get<int>(), e.at("sigma_a").get<double>(),
                                    e.at("sigma_b").get<double>()});
    return verdict;
}

}  // namespace effbench
