// End-to-end tests driving the effbench binary.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace effbench;
using Catch::Approx;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(EFFBENCH_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buffer[4096];
    while (true) {
        const std::size_t n = fread(buffer, 1, sizeof(buffer), pipe);
        if (n == 0) break;
        out.append(buffer, n);
    }
    const int status = pclose(pipe);
    CliResult result;
    result.out = std::move(out);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string temp_file(const std::string& tag, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() /
                      ("effbench_" + std::to_string(getpid()) + "_" + tag);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path.string();
}

const std::string kCnndm = testutil::data_path("cnndm.csv");
const std::string kOags = testutil::data_path("oags.csv");
const std::string kCrossover = testutil::data_path("crossover.json");

}  // namespace

TEST_CASE("cli metrics markdown emits score and efficiency tables") {
    const CliResult result = run_cli("metrics " + kCnndm + " --format markdown");
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("### Scores") != std::string::npos);
    CHECK(result.out.find("| ABS1 | 26.66 | 8.81 | 24.46 | 135032 |") != std::string::npos);
    CHECK(result.out.find("### Relative data efficiency") != std::string::npos);
    CHECK(result.out.find("| ABS12 | 7.13 | 18.27 | 4.54 | 37.41 | 0.190 | 0.488 | 0.121 |") !=
          std::string::npos);
}

TEST_CASE("cli output is byte-identical across repeated runs") {
    for (const std::string format : {"markdown", "csv", "json"}) {
        const CliResult first = run_cli("metrics " + kCnndm + " --format " + format);
        const CliResult second = run_cli("metrics " + kCnndm + " --format " + format);
        CHECK(first.exit_code == 0);
        CHECK(first.out == second.out);
        CHECK_FALSE(first.out.empty());
    }
}

TEST_CASE("cli metrics csv and json carry the full pipeline") {
    const CliResult csv = run_cli("metrics " + kCnndm + " --format csv");
    CHECK(csv.exit_code == 0);
    CHECK(csv.out.find("method,dataset,split_index,train_size,R1,R2,RL,train_time_s") !=
          std::string::npos);
    CHECK(csv.out.find("model,method,dataset,interval,sigma_R1") != std::string::npos);

    const CliResult json = run_cli("metrics " + kCnndm + " --format json --absolute");
    CHECK(json.exit_code == 0);
    const nlohmann::json doc = nlohmann::json::parse(json.out);
    REQUIRE(doc.contains("runs"));
    REQUIRE(doc.contains("relative_efficiency"));
    REQUIRE(doc.contains("absolute_efficiency"));
    CHECK(doc["runs"].size() == 21);
    CHECK(doc["relative_efficiency"].size() == 14);

    // values equal the extended-precision oracle within 1e-9
    const auto series = testutil::load_series("cnndm.csv");
    const RelativeEfficiency oracle =
        oracle_relative_efficiency(testutil::series_of(series, "ABS").interval(1), "R1");
    bool found = false;
    for (const nlohmann::json& row : doc["relative_efficiency"]) {
        if (row["model"] != "ABS12") continue;
        found = true;
        CHECK(testutil::rel_diff(row["sigma"]["R1"].get<double>(), oracle.sigma) <= 1e-9);
        CHECK(testutil::rel_diff(row["theta"].get<double>(), oracle.theta) <= 1e-9);
        CHECK(testutil::rel_diff(row["epsilon"]["R1"].get<double>(), *oracle.epsilon) <= 1e-9);
    }
    CHECK(found);
}

TEST_CASE("cli metrics interval selection modes coincide for three runs") {
    const CliResult dispersed = run_cli("metrics " + kCnndm + " --intervals dispersed");
    const CliResult all = run_cli("metrics " + kCnndm + " --intervals all");
    CHECK(dispersed.out == all.out);
}

TEST_CASE("cli data errors exit 1 with diagnostics on stderr") {
    SECTION("empty runs file") {
        const std::string path = temp_file("empty.csv", std::string(kRunsHeader) + "\n");
        const CliResult quiet = run_cli("metrics " + path);
        CHECK(quiet.exit_code == 1);
        CHECK(quiet.out.empty());
        const CliResult loud = run_cli("metrics " + path, true);
        CHECK(loud.out.find("no series") != std::string::npos);
    }
    SECTION("missing file") {
        const CliResult result = run_cli("metrics /does/not/exist.csv");
        CHECK(result.exit_code == 1);
        CHECK(result.out.empty());
    }
    SECTION("parse error carries the line") {
        const std::string path =
            temp_file("bad.csv", std::string(kRunsHeader) + "\nABS,CNNDM,1,xx,1,R1,1\n");
        const CliResult result = run_cli("metrics " + path, true);
        CHECK(result.exit_code == 1);
        CHECK(result.out.find("line 2") != std::string::npos);
    }
}

TEST_CASE("cli usage errors exit 2") {
    CHECK(run_cli("", true).exit_code == 2);
    CHECK(run_cli("unknowncmd", true).exit_code == 2);
    CHECK(run_cli("metrics", true).exit_code == 2);
    CHECK(run_cli("metrics " + kCnndm + " --format yaml", true).exit_code == 2);
    CHECK(run_cli("compare " + kCnndm + " --a PGRL --metric R1", true).exit_code == 2);
    CHECK(run_cli("compare " + kCnndm + " --a PGRL --b ABS --metric R1 --similarity 1.5", true)
              .exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("cli compare renders verdicts and always exits 0 on success") {
    const CliResult inconclusive =
        run_cli("compare " + kCnndm + " --a PGRL --b FASTRL --metric R1");
    CHECK(inconclusive.exit_code == 0);
    CHECK(inconclusive.out.find("SIMILAR_INCONCLUSIVE") != std::string::npos);

    const CliResult distinct = run_cli("compare " + kCnndm + " --a PGRL --b ABS --metric R1");
    CHECK(distinct.exit_code == 0);
    CHECK(distinct.out.find("A_DISTINCTLY_BETTER") != std::string::npos);

    const CliResult tie = run_cli("compare " + kCnndm + " --a PGRL --b PGRL --metric R1");
    CHECK(tie.exit_code == 0);
    CHECK(tie.out.find("TIE") != std::string::npos);

    const CliResult json =
        run_cli("compare " + kCnndm + " --a PGRL --b FASTRL --metric R1 --format json");
    const ComparisonVerdict verdict = parse_verdict_structured(json.out);
    CHECK(verdict.verdict == Verdict::SimilarInconclusive);
    CHECK(verdict.method_a == "PGRL");

    const CliResult unknown = run_cli("compare " + kCnndm + " --a NOPE --b ABS --metric R1");
    CHECK(unknown.exit_code == 1);
}

TEST_CASE("cli compare respects configurable thresholds") {
    // With a 1% similarity threshold the 1.98% PGRL/FASTRL gap is distinct.
    const CliResult strict = run_cli("compare " + kCnndm +
                                     " --a PGRL --b FASTRL --metric R1 --similarity 0.01");
    CHECK(strict.out.find("A_DISTINCTLY_BETTER") != std::string::npos);

    // With a 9% sigma margin the 10.0%-epsilon rightmost gap becomes decisive.
    const CliResult loose = run_cli("compare " + kCnndm +
                                    " --a PGRL --b FASTRL --metric R1 --sigma-margin 0.09");
    CHECK(loose.out.find("SIMILAR_A_LIKELY_SCALES") != std::string::npos);
}

TEST_CASE("cli dataset scoping") {
    std::string combined = testutil::read_file(kCnndm);
    const std::string oags_text = testutil::read_file(kOags);
    combined += oags_text.substr(oags_text.find('\n') + 1);
    const std::string path = temp_file("combined.csv", combined);

    const CliResult ambiguous = run_cli("compare " + path + " --a PGRL --b ABS --metric R1",
                                        true);
    CHECK(ambiguous.exit_code == 1);
    CHECK(ambiguous.out.find("--dataset") != std::string::npos);

    const CliResult scoped =
        run_cli("compare " + path + " --a PGRL --b ABS --metric R1 --dataset OAGS");
    CHECK(scoped.exit_code == 0);
    CHECK(scoped.out.find("A_DISTINCTLY_BETTER") != std::string::npos);

    const CliResult trend_ambiguous = run_cli("trend " + path + " --metric R1", true);
    CHECK(trend_ambiguous.exit_code == 1);

    const CliResult trend_scoped = run_cli("trend " + path + " --metric R1 --dataset OAGS");
    CHECK(trend_scoped.exit_code == 0);
    CHECK(trend_scoped.out.find("train_size\tABS\tPCOV\tPGRL\tTRANS") == 0);

    const CliResult unknown = run_cli("trend " + path + " --metric R1 --dataset NOPE", true);
    CHECK(unknown.exit_code == 1);
}

TEST_CASE("cli trend matches the library renderer") {
    const CliResult result = run_cli("trend " + kOags + " --metric R1");
    CHECK(result.exit_code == 0);
    const auto series = testutil::load_series("oags.csv");
    CHECK(result.out == render_trend_data(series, "R1"));
}

TEST_CASE("cli trend handles one series and averaged sizes end to end") {
    const std::string single = temp_file("single.csv", std::string(kRunsHeader) +
                                                           "\n"
                                                           "SOLO,D,1,1000,10,S,1.5\n"
                                                           "SOLO,D,2,2000,20,S,2.5\n");
    const CliResult solo = run_cli("trend " + single + " --metric S");
    CHECK(solo.exit_code == 0);
    CHECK(solo.out == "train_size\tSOLO\n1000\t1.5\n2000\t2.5\n");

    const std::string jittered = temp_file("jitter.csv", std::string(kRunsHeader) +
                                                             "\n"
                                                             "A,D,1,1000,10,S,1.0\n"
                                                             "A,D,2,2000,20,S,2.0\n"
                                                             "B,D,1,1005,11,S,1.1\n"
                                                             "B,D,2,2010,21,S,2.1\n");
    const CliResult averaged = run_cli("trend " + jittered + " --metric S");
    CHECK(averaged.exit_code == 0);
    CHECK(averaged.out.find("# train_size averaged") == 0);
    CHECK(averaged.out.find("\n1002.5\t1\t1.1\n") != std::string::npos);
}

TEST_CASE("cli simulate produces re-ingestable deterministic runs") {
    const CliResult first = run_cli("simulate " + kCrossover + " --seed 7");
    CHECK(first.exit_code == 0);
    const CliResult second = run_cli("simulate " + kCrossover + " --seed 7");
    CHECK(first.out == second.out);

    const auto records = parse_runs_delimited(first.out);
    CHECK(records.size() == 10);  // 2 curves x 5 splits
    const auto series = group_series(records);
    REQUIRE(series.size() == 2);

    // --out writes the same bytes to a file
    const std::string out_path =
        (std::filesystem::temp_directory_path() /
         ("effbench_" + std::to_string(getpid()) + "_sim.csv"))
            .string();
    const CliResult to_file = run_cli("simulate " + kCrossover + " --seed 7 --out " + out_path);
    CHECK(to_file.exit_code == 0);
    CHECK(to_file.out.empty());
    CHECK(testutil::read_file(out_path) == first.out);

    // pipeline smoke test: the simulated file feeds cmd_metrics and compare
    const CliResult metrics = run_cli("metrics " + out_path);
    CHECK(metrics.exit_code == 0);
    CHECK(metrics.out.find("| A12 |") != std::string::npos);
    const CliResult compare = run_cli("compare " + out_path + " --a A --b B --metric R1");
    CHECK(compare.exit_code == 0);
    CHECK(compare.out.find("SIMILAR_A_LIKELY_SCALES") != std::string::npos);

    const CliResult bad_spec =
        run_cli("simulate " + temp_file("badspec.json", "{\"method\": \"X\"}") + " --seed 1",
                true);
    CHECK(bad_spec.exit_code == 1);
}

TEST_CASE("cli reads runs from stdin") {
    const CliResult from_stdin = run_cli("metrics - < " + kCnndm);
    const CliResult from_file = run_cli("metrics " + kCnndm);
    CHECK(from_stdin.exit_code == 0);
    CHECK(from_stdin.out == from_file.out);
}

TEST_CASE("cli accepts structured runs files") {
    const auto records =
        parse_runs_delimited(testutil::read_file(kCnndm));
    const std::string json_path = temp_file("runs.json", write_runs_structured(records));
    const CliResult from_json = run_cli("metrics " + json_path);
    const CliResult from_csv = run_cli("metrics " + kCnndm);
    CHECK(from_json.exit_code == 0);
    CHECK(from_json.out == from_csv.out);
}
