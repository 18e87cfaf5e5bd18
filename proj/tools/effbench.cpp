// effbench: command-line front door. Ingests run logs, computes the
// data-efficiency metrics, compares two methods, emits trend plot data,
// simulates synthetic runs.
//
// Exit codes: 0 data success, 1 data/validation error, 2 usage error.
// Standard output carries only data; diagnostics go to standard error.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "effbench/effbench.hpp"

namespace {

using namespace effbench;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<RunRecord> load_runs(const std::string& path) {
    const std::string text = read_input(path);
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    const bool structured =
        first != std::string::npos && (text[first] == '[' || text[first] == '{');
    return structured ? parse_runs_structured(text) : parse_runs_delimited(text);
}

/// Keeps only the series of the requested dataset; without --dataset the
/// input must hold exactly one.
std::vector<MethodSeries> scope_dataset(std::vector<MethodSeries> series,
                                        const std::string& dataset) {
    if (!dataset.empty()) {
        std::erase_if(series, [&](const MethodSeries& s) { return s.dataset() != dataset; });
        if (series.empty())
            throw error(errc::unknown_dataset, "no series for dataset '" + dataset + "'");
        return series;
    }
    for (const MethodSeries& s : series)
        if (s.dataset() != series.front().dataset())
            throw error(errc::mismatched_datasets,
                        "input holds several datasets; disambiguate with --dataset");
    return series;
}

const MethodSeries& find_method(const std::vector<MethodSeries>& series,
                                const std::string& method) {
    for (const MethodSeries& s : series)
        if (s.method() == method) return s;
    throw error(errc::unknown_method, "no series for method '" + method + "'");
}

struct MetricsOptions {
    std::string file;
    std::string format = "markdown";
    std::string intervals = "dispersed";
    bool absolute = false;
};

int run_metrics(const MetricsOptions& opt) {
    const std::vector<RunRecord> records = load_runs(opt.file);
    const std::vector<MethodSeries> series = group_series(records);
    if (series.empty()) throw error(errc::empty_input, "no series in input");

    const IntervalSelection mode =
        opt.intervals == "all" ? IntervalSelection::All : IntervalSelection::Dispersed;
    std::vector<SeriesEfficiency> metrics;
    for (const MethodSeries& s : series) {
        SeriesEfficiency eff = series_efficiency(s);
        const std::vector<int> picks = select_report_intervals(s.run_count(), mode);
        std::erase_if(eff.entries, [&](const EfficiencyEntry& e) {
            return std::find(picks.begin(), picks.end(), e.interval) == picks.end();
        });
        metrics.push_back(std::move(eff));
    }

    if (opt.format == "json") {
        std::vector<RunRecord> runs;
        for (const MethodSeries& s : series)
            runs.insert(runs.end(), s.runs().begin(), s.runs().end());
        nlohmann::json doc;
        doc["runs"] = runs_to_json(runs);
        doc["relative_efficiency"] = efficiency_to_json(metrics, EfficiencyKind::Relative);
        if (opt.absolute)
            doc["absolute_efficiency"] = efficiency_to_json(metrics, EfficiencyKind::Absolute);
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    const TableFormat format =
        opt.format == "csv" ? TableFormat::Delimited : TableFormat::Markdown;
    const bool markdown = format == TableFormat::Markdown;
    if (markdown) std::cout << "### Scores\n\n";
    std::cout << render_score_table(series, format);
    std::cout << "\n";
    if (markdown) std::cout << "### Relative data efficiency\n\n";
    std::cout << render_efficiency_table(metrics, format, EfficiencyKind::Relative);
    if (opt.absolute) {
        std::cout << "\n";
        if (markdown) std::cout << "### Absolute data efficiency\n\n";
        std::cout << render_efficiency_table(metrics, format, EfficiencyKind::Absolute);
    }
    return 0;
}

struct CompareOptions {
    std::string file;
    std::string method_a;
    std::string method_b;
    std::string metric;
    std::string dataset;
    double similarity = SchemeConfig{}.similarity_threshold;
    double sigma_margin = SchemeConfig{}.sigma_margin;
    std::string format = "text";
};

int run_compare(const CompareOptions& opt) {
    const std::vector<MethodSeries> series =
        scope_dataset(group_series(load_runs(opt.file)), opt.dataset);
    const MethodSeries& a = find_method(series, opt.method_a);
    const MethodSeries& b = find_method(series, opt.method_b);
    SchemeConfig config;
    config.similarity_threshold = opt.similarity;
    config.sigma_margin = opt.sigma_margin;
    const ComparisonVerdict verdict = compare_methods(a, b, opt.metric, config);
    std::cout << render_verdict(verdict, opt.format == "json" ? VerdictFormat::Structured
                                                              : VerdictFormat::Text);
    return 0;  // verdict outcomes never alter the exit code
}

struct TrendOptions {
    std::string file;
    std::string metric;
    std::string dataset;
};

int run_trend(const TrendOptions& opt) {
    const std::vector<MethodSeries> series =
        scope_dataset(group_series(load_runs(opt.file)), opt.dataset);
    std::cout << render_trend_data(series, opt.metric);
    return 0;
}

struct SimulateOptions {
    std::string file;
    std::uint64_t seed = 0;
    std::string out;
};

int run_simulate(const SimulateOptions& opt) {
    const std::vector<CurveSpec> specs = parse_curve_specs(read_input(opt.file));
    std::vector<RunRecord> runs;
    std::uint64_t index = 0;
    for (const CurveSpec& spec : specs) {
        // Per-spec seeds are consecutive so multi-curve files draw
        // independent noise streams.
        const MethodSeries series = generate_series(spec, opt.seed + index++);
        runs.insert(runs.end(), series.runs().begin(), series.runs().end());
    }
    const std::string text = write_runs_delimited(runs);
    if (opt.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + opt.out);
        out << text;
    }
    return 0;
}

CLI::Validator unit_interval() {
    return CLI::Validator(
        [](std::string& value) -> std::string {
            try {
                const double v = std::stod(value);
                if (v > 0.0 && v < 1.0) return {};
            } catch (const std::exception&) {
            }
            return "value must be in (0,1)";
        },
        "FLOAT in (0,1)");
}

}  // namespace

int main(int argc, char** argv) try {
    CLI::App app{"effbench - data-efficiency metrics and comparisons from training-run logs"};
    app.require_subcommand(1);

    MetricsOptions metrics_opt;
    CLI::App* metrics_cmd =
        app.add_subcommand("metrics", "Score table plus data-efficiency tables");
    metrics_cmd->add_option("runs-file", metrics_opt.file, "runs file (csv or json, '-' = stdin)")
        ->required();
    metrics_cmd->add_option("--format", metrics_opt.format, "output format")
        ->check(CLI::IsMember({"markdown", "csv", "json"}))
        ->capture_default_str();
    metrics_cmd->add_option("--intervals", metrics_opt.intervals, "which intervals to report")
        ->check(CLI::IsMember({"all", "dispersed"}))
        ->capture_default_str();
    metrics_cmd->add_flag("--absolute", metrics_opt.absolute,
                          "also emit the absolute Sigma/Theta/E table");

    CompareOptions compare_opt;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "Compare two methods on one score key");
    compare_cmd->add_option("runs-file", compare_opt.file, "runs file ('-' = stdin)")->required();
    compare_cmd->add_option("--a", compare_opt.method_a, "first method")->required();
    compare_cmd->add_option("--b", compare_opt.method_b, "second method")->required();
    compare_cmd->add_option("--metric", compare_opt.metric, "score key to compare on")
        ->required();
    compare_cmd->add_option("--dataset", compare_opt.dataset,
                            "dataset id (required when the file holds several)");
    compare_cmd->add_option("--similarity", compare_opt.similarity,
                            "relative final-score gap treated as similar")
        ->check(unit_interval())
        ->capture_default_str();
    compare_cmd->add_option("--sigma-margin", compare_opt.sigma_margin,
                            "relative rightmost-sigma gap treated as significant")
        ->check(unit_interval())
        ->capture_default_str();
    compare_cmd->add_option("--format", compare_opt.format, "output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    TrendOptions trend_opt;
    CLI::App* trend_cmd = app.add_subcommand("trend", "Tab-separated score trend data");
    trend_cmd->add_option("runs-file", trend_opt.file, "runs file ('-' = stdin)")->required();
    trend_cmd->add_option("--metric", trend_opt.metric, "score key to plot")->required();
    trend_cmd->add_option("--dataset", trend_opt.dataset,
                          "dataset id (required when the file holds several)");

    SimulateOptions simulate_opt;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "Generate synthetic runs from curve specs");
    simulate_cmd->add_option("spec-file", simulate_opt.file, "curve spec json ('-' = stdin)")
        ->required();
    simulate_cmd->add_option("--seed", simulate_opt.seed, "generator seed")->required();
    simulate_cmd->add_option("--out", simulate_opt.out, "output file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*metrics_cmd) return run_metrics(metrics_opt);
        if (*compare_cmd) return run_compare(compare_opt);
        if (*trend_cmd) return run_trend(trend_opt);
        if (*simulate_cmd) return run_simulate(simulate_opt);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 2;
} catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
}
