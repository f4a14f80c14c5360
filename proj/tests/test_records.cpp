#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gapcert/records.hpp"

using namespace gapcert;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

// File content with the volatile timestamp stripped, for byte comparisons.
std::string stable_content(const std::string& path) {
    std::ostringstream out;
    for (const auto& line : read_lines(path))
        if (line.find("created_at") == std::string::npos) out << line << '\n';
    return out.str();
}

GapResult small_gap_result(const ExperimentConfig& cfg) {
    auto samples = draw_comparison_samples(cfg.profile, 12, cfg.master_seed,
                                           "gap", 4, 1);
    return estimate_gap(std::move(samples), cfg.gap.epsilon, cfg.profile.name,
                        cfg.master_seed);
}

}  // namespace

TEST_CASE("state, certificate, and scenario JSON shapes") {
    const auto s = to_json(ModelState{1.0, -2.0, 0.5});
    CHECK(s.at("x") == 1.0);
    CHECK(s.at("theta") == 0.5);

    const auto c = to_json(make_certificate(600, 0.005, 1));
    CHECK(c.at("sample_count") == 600);
    CHECK(c.at("dimension") == 1);
    CHECK(c.at("confidence").get<double>() ==
          doctest::Approx(confidence_scalar(600, 0.005)));

    Scenario sc;
    sc.grid_width = 3;
    sc.grid_height = 2;
    sc.cell_size = 0.5;
    sc.start_cell = {1, 0};
    sc.static_obstacles = {{2, 1}};
    sc.goals = {{0, 1}};
    sc.seed = 77;
    const auto j = to_json(sc);
    CHECK(j.at("start_cell") == nlohmann::json::array({1, 0}));
    CHECK(j.at("static_obstacles")[0] == nlohmann::json::array({2, 1}));
    CHECK(j.at("goals").size() == 1);
    CHECK(j.at("seed") == 77);
}

TEST_CASE("gap results survive the round trip") {
    const std::string dir = "records_gap";
    auto cfg = default_config("robotarium");
    cfg.master_seed = 5;
    cfg.finalize();
    const GapResult result = small_gap_result(cfg);
    write_gap_result(dir, result, cfg);

    const GapResult back = read_gap_result(dir + "/gap_result.json");
    CHECK(back.gap == result.gap);
    CHECK(back.certificate.sample_count == 12);
    CHECK(back.certificate.epsilon == result.certificate.epsilon);
    CHECK(back.certificate.confidence == result.certificate.confidence);
    CHECK(back.profile_name == "robotarium");
    CHECK(back.master_seed == 5);

    // The sample log: one header line plus one line per sample, all JSON.
    const auto lines = read_lines(dir + "/gap_samples.jsonl");
    REQUIRE(lines.size() == 13);
    const auto head = nlohmann::json::parse(lines[0]);
    CHECK(head.at("schema") == "gapcert/gap-samples/v1");
    CHECK(head.at("config_hash") == cfg.config_hash);
    CHECK(head.at("master_seed") == 5);
    CHECK(head.at("stream_tag") == "gap");
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto rec = nlohmann::json::parse(lines[i]);
        CHECK(rec.at("index") == i - 1);
        CHECK(rec.at("gap_value").get<double>() >= 0.0);
        CHECK(rec.count("observed") == 1);
        CHECK(rec.count("predicted") == 1);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("tampered result files are rejected") {
    const std::string dir = "records_tamper";
    auto cfg = default_config("robotarium");
    write_gap_result(dir, small_gap_result(cfg), cfg);
    const std::string path = dir + "/gap_result.json";

    auto j = read_json_file(path);
    j["certificate"]["confidence"] = 0.5;  // no longer matches (N, eps)
    write_json_file(path, j);
    CHECK_THROWS_AS(read_gap_result(path), ConfigError);

    j = read_json_file(path);
    j["schema"] = "gapcert/other/v1";
    write_json_file(path, j);
    CHECK_THROWS_AS(read_gap_result(path), ConfigError);

    std::ofstream(path) << "garbage{";
    CHECK_THROWS_AS(read_gap_result(path), ConfigError);
    CHECK_THROWS_AS(read_gap_result("missing_dir/gap_result.json"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("rewrites are byte-identical except for the timestamp") {
    auto cfg = default_config("robotarium");
    const GapResult result = small_gap_result(cfg);
    write_gap_result("records_a", result, cfg);
    write_gap_result("records_b", result, cfg);
    CHECK(stable_content("records_a/gap_result.json") ==
          stable_content("records_b/gap_result.json"));
    // The sample log carries no timestamp at all.
    CHECK(read_lines("records_a/gap_samples.jsonl") ==
          read_lines("records_b/gap_samples.jsonl"));
    std::filesystem::remove_all("records_a");
    std::filesystem::remove_all("records_b");
}

TEST_CASE("verification summaries round-trip through the result file") {
    const std::string dir = "records_verify";
    auto cfg = default_config("robotarium");
    VerificationResult r;
    r.min_safety = 0.4;
    r.certificate = make_certificate(300, 0.01, 1);
    r.controller_id = "nav-polar/" + cfg.config_hash;
    r.master_seed = cfg.master_seed;
    r.pass = true;
    VerificationSample s;
    s.seed = 9;
    s.safety = SafetyValue{0.4, false, true, 120};
    s.scenario.grid_width = 8;
    s.scenario.grid_height = 5;
    s.scenario.cell_size = 0.4;
    s.scenario.goals = {{1, 1}};
    r.samples.push_back(s);
    write_verification_result(dir, r, cfg);

    const auto sum = read_verification_summary(dir + "/verify_result.json");
    CHECK(sum.min_safety == 0.4);
    CHECK(sum.pass);
    CHECK(sum.certificate.sample_count == 300);
    CHECK(sum.config_hash == cfg.config_hash);
    CHECK(sum.master_seed == cfg.master_seed);

    const auto lines = read_lines(dir + "/verify_samples.jsonl");
    REQUIRE(lines.size() == 2);
    const auto rec = nlohmann::json::parse(lines[1]);
    CHECK(rec.at("safety").at("value") == 0.4);
    CHECK(rec.at("scenario").at("goals")[0] == nlohmann::json::array({1, 1}));

    CHECK_THROWS_AS(read_verification_summary("records_verify/nope.json"),
                    ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("histograms bin correctly and carry the footer") {
    const std::string path = "hist_test.csv";
    const std::vector<double> values = {0.0, 0.25, 0.5, 0.75, 1.0};
    write_histogram_csv(path, values, 4, 0.9, 1.0);

    const auto lines = read_lines(path);
    REQUIRE(lines.size() == 6);  // header + 4 bins + footer
    CHECK(lines[0] == "bin_left,bin_right,count");
    CHECK(lines.back().rfind("footer,", 0) == 0);

    // Width 0.25; the max value lands in the last bin.
    std::size_t total = 0;
    for (int b = 1; b <= 4; ++b) {
        const auto& row = lines[static_cast<std::size_t>(b)];
        const auto last = row.rfind(',');
        total += std::stoul(row.substr(last + 1));
    }
    CHECK(total == values.size());
    CHECK(lines[4].substr(lines[4].rfind(',') + 1) == "2");

    // Constant values degenerate to a single loaded bin, not a crash.
    write_histogram_csv(path, std::vector<double>(7, 3.0), 4, 3.0, 3.0);
    const auto flat = read_lines(path);
    CHECK(flat[1].substr(flat[1].rfind(',') + 1) == "7");

    CHECK_THROWS_AS(write_histogram_csv(path, {}, 4, 0.0, 0.0),
                    std::invalid_argument);
    std::filesystem::remove(path);
}

TEST_CASE("deployment reports list every run outcome") {
    const std::string dir = "records_deploy";
    auto cfg = default_config("robotarium");
    DeploymentReport report;
    DeploymentRun run;
    run.seed = 3;
    run.success = true;
    run.reached_goal = true;
    run.ticks_used = 2;
    run.safety_value = 0.8;
    run.trace = {{0, 0, 0}, {0.1, 0, 0}, {0.2, 0, 0}};
    run.scenario.goals = {{0, 0}};
    report.runs.push_back(run);
    report.successes = 1;
    report.max_ticks = 100;
    write_deployment_report(dir, report, cfg, cfg.master_seed, true);

    const auto j = read_json_file(dir + "/deploy_report.json");
    CHECK(j.at("schema") == "gapcert/deploy-report/v1");
    CHECK(j.at("runs") == 1);
    CHECK(j.at("successes") == 1);
    CHECK(j.at("verified_input") == true);
    CHECK(j.at("outcomes")[0].at("ticks_used") == 2);

    const auto lines = read_lines(dir + "/deploy_runs.jsonl");
    REQUIRE(lines.size() == 2);
    const auto rec = nlohmann::json::parse(lines[1]);
    CHECK(rec.at("trace").size() == 3);
    CHECK(rec.at("safety_value") == 0.8);
    std::filesystem::remove_all(dir);
}
