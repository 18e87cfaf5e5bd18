#pragma once

// Run-log ingestion. Two interconvertible formats:
//
//   delimited  - CSV, long format, one score per line, header exactly
//               method,dataset,split_index,train_size,train_time_s,metric,score
//   structured - JSON, top-level array of run objects with a scores map
//
// Lines/objects sharing (method, dataset, split_index) merge into one record;
// duplicates must agree exactly. Every error names the offending line or
// field; no row is ever dropped silently.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "effbench/core.hpp"

namespace effbench {

inline constexpr std::string_view kRunsHeader =
    "method,dataset,split_index,train_size,train_time_s,metric,score";

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view text, const std::string& field, std::size_t line_no) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty() || !std::isfinite(value))
        throw error(errc::unparsable_number, "line " + std::to_string(line_no) + ", field '" +
                                                 field + "': cannot parse number from '" +
                                                 std::string(text) + "'");
    return value;
}

inline long long parse_count(std::string_view text, const std::string& field,
                             std::size_t line_no) {
    const auto reject = [&]() -> error {
        return error(errc::unparsable_number, "line " + std::to_string(line_no) + ", field '" +
                                                  field + "': '" + std::string(text) +
                                                  "' is not a positive integer");
    };
    long long value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc{} && ptr == last) {
        if (value < 1) throw reject();
        return value;
    }
    // Fall back to float syntax for counts written like 9.6e4.
    const double real = parse_double(text, field, line_no);
    if (!(real >= 1.0) || real != std::floor(real) || real > 9.007199254740992e15) throw reject();
    return static_cast<long long>(real);
}

/// Accumulates score lines into records, preserving first-appearance order.
class RecordBuilder {
public:
    // `where` describes the source location for error messages ("line 7",
    // "object 3").
    void add(const std::string& method, const std::string& dataset, int split_index,
             long long train_size, double train_time_s, const std::string& metric, double score,
             const std::string& where) {
        const Key key{method, dataset, split_index};
        auto it = index_.find(key);
        if (it == index_.end()) {
            RunRecord record;
            record.method = method;
            record.dataset = dataset;
            record.split_index = split_index;
            record.train_size = train_size;
            record.train_time_s = train_time_s;
            record.scores[metric] = score;
            try {
                record.validate();
            } catch (const error& ex) {
                throw error(ex.code(), where + ": " + ex.what());
            }
            index_.emplace(key, records_.size());
            records_.push_back(std::move(record));
            return;
        }
        RunRecord& record = records_[it->second];
        if (record.train_size != train_size || record.train_time_s != train_time_s)
            throw error(errc::inconsistent_split_meta,
                        where + ": split " + std::to_string(split_index) + " of " + method + "/" +
                            dataset + " repeats with different train_size or train_time_s");
        auto [score_it, inserted] = record.scores.emplace(metric, score);
        if (!inserted && score_it->second != score)
            throw error(errc::conflicting_duplicate,
                        where + ": duplicate metric '" + metric + "' for " + method + "/" +
                            dataset + " split " + std::to_string(split_index) +
                            " with a different score");
    }

    std::vector<RunRecord> take() { return std::move(records_); }

private:
    using Key = std::tuple<std::string, std::string, int>;
    std::map<Key, std::size_t> index_;
    std::vector<RunRecord> records_;
};

}  // namespace detail

/// Parses the delimited (CSV, long) format. Accepts LF or CRLF line endings,
/// trims surrounding whitespace per field and skips empty lines.
inline std::vector<RunRecord> parse_runs_delimited(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);  // UTF-8 BOM

    auto next_line = [&text]() {
        const std::size_t eol = text.find('\n');
        std::string_view raw = text.substr(0, eol);
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        return detail::trim(raw);
    };

    if (next_line() != kRunsHeader)
        throw error(errc::header_mismatch,
                    "line 1: expected header '" + std::string(kRunsHeader) + "'");

    detail::RecordBuilder builder;
    std::size_t line_no = 1;
    while (!text.empty()) {
        const std::string_view line = next_line();
        ++line_no;
        if (line.empty()) continue;

        std::vector<std::string_view> fields;
        std::string_view rest = line;
        while (true) {
            const std::size_t comma = rest.find(',');
            fields.push_back(detail::trim(rest.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 7)
            throw error(errc::bad_field_count, "line " + std::to_string(line_no) + ": expected 7 "
                                               "fields, got " + std::to_string(fields.size()));

        const std::string where = "line " + std::to_string(line_no);
        const long long split = detail::parse_count(fields[2], "split_index", line_no);
        if (split > 1000000)
            throw error(errc::unparsable_number, where + ": split_index out of range");
        builder.add(std::string(fields[0]), std::string(fields[1]), static_cast<int>(split),
                    detail::parse_count(fields[3], "train_size", line_no),
                    detail::parse_double(fields[4], "train_time_s", line_no),
                    std::string(fields[5]), detail::parse_double(fields[6], "score", line_no),
                    where);
    }
    return builder.take();
}

/// Parses the structured (JSON) format: a top-level array of run objects.
inline std::vector<RunRecord> parse_runs_structured(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw error(errc::malformed_document, std::string("structured runs: ") + ex.what());
    }
    if (!doc.is_array())
        throw error(errc::malformed_document, "structured runs: top-level value must be an array");

    auto field = [](const nlohmann::json& obj, const char* name,
                    const std::string& where) -> const nlohmann::json& {
        auto it = obj.find(name);
        if (it == obj.end())
            throw error(errc::missing_field, where + ": missing field '" + name + "'");
        return *it;
    };

    detail::RecordBuilder builder;
    std::size_t pos = 0;
    for (const nlohmann::json& obj : doc) {
        const std::string where = "object " + std::to_string(pos++);
        if (!obj.is_object())
            throw error(errc::wrong_type, where + ": array element is not an object");

        const nlohmann::json& method = field(obj, "method", where);
        const nlohmann::json& dataset = field(obj, "dataset", where);
        const nlohmann::json& split = field(obj, "split_index", where);
        const nlohmann::json& size = field(obj, "train_size", where);
        const nlohmann::json& time = field(obj, "train_time_s", where);
        const nlohmann::json& scores = field(obj, "scores", where);

        if (!method.is_string()) throw error(errc::wrong_type, where + ": 'method' must be a string");
        if (!dataset.is_string())
            throw error(errc::wrong_type, where + ": 'dataset' must be a string");
        if (!split.is_number_integer())
            throw error(errc::wrong_type, where + ": 'split_index' must be an integer");
        if (!size.is_number_integer())
            throw error(errc::wrong_type, where + ": 'train_size' must be an integer");
        if (!time.is_number())
            throw error(errc::wrong_type, where + ": 'train_time_s' must be a number");
        if (!scores.is_object())
            throw error(errc::wrong_type, where + ": 'scores' must be an object");

        const long long split_value = split.get<long long>();
        if (split_value < 1 || split_value > 1000000)
            throw error(errc::invalid_record, where + ": split_index out of range");
        for (auto it = scores.begin(); it != scores.end(); ++it) {
            if (!it.value().is_number())
                throw error(errc::wrong_type,
                            where + ": score '" + it.key() + "' must be a number");
            builder.add(method.get<std::string>(), dataset.get<std::string>(),
                        static_cast<int>(split_value), size.get<long long>(), time.get<double>(),
                        it.key(), it.value().get<double>(), where);
        }
        if (scores.empty())
            throw error(errc::invalid_record, where + ": scores map is empty");
    }
    return builder.take();
}

/// Serializes records to the delimited format (canonical: sorted scores per
/// record, shortest round-trip number rendering).
inline std::string write_runs_delimited(std::span<const RunRecord> records) {
    const auto& format_number = detail::format_double;
    std::string out(kRunsHeader);
    out += '\n';
    for (const RunRecord& record : records) {
        for (const auto& [metric, score] : record.scores) {
            out += record.method;
            out += ',';
            out += record.dataset;
            out += ',';
            out += std::to_string(record.split_index);
            out += ',';
            out += std::to_string(record.train_size);
            out += ',';
            out += format_number(record.train_time_s);
            out += ',';
            out += metric;
            out += ',';
            out += format_number(score);
            out += '\n';
        }
    }
    return out;
}

inline nlohmann::json runs_to_json(std::span<const RunRecord> records) {
    nlohmann::json doc = nlohmann::json::array();
    for (const RunRecord& record : records) {
        nlohmann::json obj;
        obj["method"] = record.method;
        obj["dataset"] = record.dataset;
        obj["split_index"] = record.split_index;
        obj["train_size"] = record.train_size;
        obj["train_time_s"] = record.train_time_s;
        obj["scores"] = nlohmann::json::object();
        for (const auto& [metric, score] : record.scores) obj["scores"][metric] = score;
        doc.push_back(std::move(obj));
    }
    return doc;
}

/// Serializes records to the structured format.
inline std::string write_runs_structured(std::span<const RunRecord> records) {
    return runs_to_json(records).dump(2) + "\n";
}

/// Groups records into validated series, one per (method, dataset), sorted by
/// (dataset, method) for deterministic downstream output.
inline std::vector<MethodSeries> group_series(std::span<const RunRecord> records) {
    std::map<std::pair<std::string, std::string>, std::vector<RunRecord>> groups;
    for (const RunRecord& record : records)
        groups[{record.dataset, record.method}].push_back(record);

    std::vector<MethodSeries> series;
    series.reserve(groups.size());
    for (auto& [key, runs] : groups) series.emplace_back(std::move(runs));
    return series;
}

}  // namespace effbench
