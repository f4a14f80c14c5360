#include "gapcert/records.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace gapcert {

namespace {

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

nlohmann::json header(const std::string& schema, const ExperimentConfig& config,
                      std::uint64_t seed) {
    return {{"schema", schema},
            {"config_hash", config.config_hash},
            {"master_seed", seed},
            {"profile", config.profile.name}};
}

nlohmann::json obstacle_json(const ObstaclePose& p) {
    return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

std::string join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

}  // namespace

nlohmann::json to_json(const ModelState& s) {
    return {{"x", s.x}, {"y", s.y}, {"theta", s.theta}};
}

nlohmann::json to_json(const Certificate& c) {
    return {{"sample_count", c.sample_count},
            {"epsilon", c.epsilon},
            {"confidence", c.confidence},
            {"dimension", c.dimension}};
}

nlohmann::json to_json(const Scenario& s) {
    auto cells = [](const std::vector<Cell>& v) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& c : v) a.push_back({c.col, c.row});
        return a;
    };
    nlohmann::json moving = nlohmann::json::array();
    for (const auto& o : s.moving_obstacles) moving.push_back(obstacle_json(o));
    return {{"grid_width", s.grid_width},
            {"grid_height", s.grid_height},
            {"cell_size", s.cell_size},
            {"static_obstacles", cells(s.static_obstacles)},
            {"goals", cells(s.goals)},
            {"start_cell", {s.start_cell.col, s.start_cell.row}},
            {"moving_obstacles", moving},
            {"seed", s.seed}};
}

nlohmann::json to_json(const SafetyValue& s) {
    return {{"value", s.value},
            {"crashed", s.crashed},
            {"reached_goal", s.reached_goal},
            {"steps_used", s.steps_used}};
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("corrupt file '" + path + "': " + e.what());
    }
    return j;
}

RecordWriter::RecordWriter(const std::string& path, const std::string& schema,
                           const std::string& config_hash,
                           std::uint64_t master_seed, const nlohmann::json& extra) {
    out_.open(path);
    if (!out_) throw ConfigError("cannot write '" + path + "'");
    nlohmann::json h = {{"schema", schema},
                        {"config_hash", config_hash},
                        {"master_seed", master_seed}};
    for (const auto& [k, v] : extra.items()) h[k] = v;
    out_ << h.dump() << '\n';
}

void RecordWriter::write(const nlohmann::json& record) {
    out_ << record.dump() << '\n';
}

void write_gap_result(const std::string& dir, const GapResult& result,
                      const ExperimentConfig& config) {
    std::filesystem::create_directories(dir);

    nlohmann::json j = header("gapcert/gap-result/v1", config, result.master_seed);
    j["gap"] = result.gap;
    j["certificate"] = to_json(result.certificate);
    j["sample_count"] = result.samples.size();
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "gap_result.json"), j);

    RecordWriter log(join(dir, "gap_samples.jsonl"), "gapcert/gap-samples/v1",
                     config.config_hash, result.master_seed,
                     {{"profile", result.profile_name},
                      {"chains", config.gap.chains},
                      {"stream_tag", "gap"}});
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& s = result.samples[i];
        log.write({{"index", i},
                   {"seed", result.master_seed},
                   {"x0", to_json(project_state(s.initial_state))},
                   {"input", {{"v", s.model_input.v}, {"omega", s.model_input.omega}}},
                   {"observed", to_json(s.observed)},
                   {"predicted", to_json(s.predicted)},
                   {"gap_value", s.gap_value}});
    }
}

GapResult read_gap_result(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    GapResult r;
    try {
        if (j.at("schema").get<std::string>() != "gapcert/gap-result/v1")
            throw ConfigError("'" + path + "' is not a gap result file");
        r.gap = j.at("gap").get<double>();
        const auto& c = j.at("certificate");
        r.certificate.sample_count = c.at("sample_count").get<std::int64_t>();
        r.certificate.epsilon = c.at("epsilon").get<double>();
        r.certificate.confidence = c.at("confidence").get<double>();
        r.certificate.dimension = c.at("dimension").get<std::int64_t>();
        r.profile_name = j.at("profile").get<std::string>();
        r.master_seed = j.at("master_seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("corrupt gap result '" + path + "': " + e.what());
    }
    if (!certificate_consistent(r.certificate))
        throw ConfigError("gap result '" + path +
                          "' has an inconsistent certificate");
    return r;
}

void write_coverage_report(const std::string& dir, const CoverageReport& report,
                           const ExperimentConfig& config, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    nlohmann::json j = header("gapcert/coverage-report/v1", config, seed);
    j["samples"] = report.samples;
    j["contained"] = report.contained;
    j["fraction"] = report.fraction;
    j["epsilon"] = report.epsilon;
    j["radius"] = report.radius;
    j["pass"] = report.pass;
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "coverage_report.json"), j);
}

void write_verification_result(const std::string& dir,
                               const VerificationResult& result,
                               const ExperimentConfig& config) {
    std::filesystem::create_directories(dir);

    nlohmann::json j =
        header("gapcert/verify-result/v1", config, result.master_seed);
    j["min_safety"] = result.min_safety;
    j["certificate"] = to_json(result.certificate);
    j["controller_id"] = result.controller_id;
    j["sample_count"] = result.samples.size();
    j["pass"] = result.pass;
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "verify_result.json"), j);

    RecordWriter log(join(dir, "verify_samples.jsonl"),
                     "gapcert/verify-samples/v1", config.config_hash,
                     result.master_seed,
                     {{"controller_id", result.controller_id},
                      {"stream_tag", "verify"}});
    for (std::size_t i = 0; i < result.samples.size(); ++i) {
        const auto& s = result.samples[i];
        log.write({{"index", i},
                   {"seed", s.seed},
                   {"safety", to_json(s.safety)},
                   {"scenario", to_json(s.scenario)}});
    }
}

VerificationSummary read_verification_summary(const std::string& path) {
    const nlohmann::json j = read_json_file(path);
    VerificationSummary s;
    try {
        if (j.at("schema").get<std::string>() != "gapcert/verify-result/v1")
            throw ConfigError("'" + path + "' is not a verification result file");
        s.min_safety = j.at("min_safety").get<double>();
        const auto& c = j.at("certificate");
        s.certificate.sample_count = c.at("sample_count").get<std::int64_t>();
        s.certificate.epsilon = c.at("epsilon").get<double>();
        s.certificate.confidence = c.at("confidence").get<double>();
        s.certificate.dimension = c.at("dimension").get<std::int64_t>();
        s.pass = j.at("pass").get<bool>();
        s.master_seed = j.at("master_seed").get<std::uint64_t>();
        s.config_hash = j.at("config_hash").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("corrupt verification result '" + path + "': " + e.what());
    }
    return s;
}

void write_gap_validation(const std::string& dir, const GapValidation& v,
                          const GapResult& result, const ExperimentConfig& config,
                          const std::vector<double>& fresh_gaps) {
    std::filesystem::create_directories(dir);
    nlohmann::json j =
        header("gapcert/gap-validation/v1", config, result.master_seed);
    j["certified_gap"] = result.gap;
    j["violation"] = v.violation;
    j["cutoff"] = v.cutoff;
    j["epsilon"] = v.epsilon;
    j["fresh_count"] = v.fresh_count;
    j["pass"] = v.pass;
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "validate_gap.json"), j);
    write_histogram_csv(join(dir, "gap_hist.csv"), fresh_gaps,
                        config.validation.histogram_bins, v.cutoff, result.gap);
}

void write_safety_validation(const std::string& dir, const SafetyValidation& v,
                             double min_safety, const ExperimentConfig& config,
                             const std::vector<double>& fresh_values) {
    std::filesystem::create_directories(dir);
    nlohmann::json j =
        header("gapcert/safety-validation/v1", config, config.master_seed);
    j["min_safety"] = min_safety;
    j["violation"] = v.violation;
    j["cutoff"] = v.cutoff;
    j["epsilon"] = v.epsilon;
    j["fresh_count"] = v.fresh_count;
    j["pass"] = v.pass;
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "validate_safety.json"), j);
    write_histogram_csv(join(dir, "safety_hist.csv"), fresh_values,
                        config.validation.histogram_bins, v.cutoff, min_safety);
}

void write_deployment_report(const std::string& dir, const DeploymentReport& report,
                             const ExperimentConfig& config, std::uint64_t seed,
                             bool verified_input) {
    std::filesystem::create_directories(dir);

    nlohmann::json j = header("gapcert/deploy-report/v1", config, seed);
    j["runs"] = report.runs.size();
    j["successes"] = report.successes;
    j["max_ticks"] = report.max_ticks;
    j["verified_input"] = verified_input;
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& r : report.runs)
        outcomes.push_back({{"seed", r.seed},
                            {"success", r.success},
                            {"crashed", r.crashed},
                            {"reached_goal", r.reached_goal},
                            {"ticks_used", r.ticks_used},
                            {"safety_value", r.safety_value}});
    j["outcomes"] = outcomes;
    j["created_at"] = timestamp_utc();
    write_json_file(join(dir, "deploy_report.json"), j);

    RecordWriter log(join(dir, "deploy_runs.jsonl"), "gapcert/deploy-runs/v1",
                     config.config_hash, seed, {{"stream_tag", "deploy"}});
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& r = report.runs[i];
        nlohmann::json trace = nlohmann::json::array();
        for (const auto& p : r.trace) trace.push_back({p.x, p.y, p.theta});
        log.write({{"index", i},
                   {"seed", r.seed},
                   {"success", r.success},
                   {"crashed", r.crashed},
                   {"reached_goal", r.reached_goal},
                   {"ticks_used", r.ticks_used},
                   {"safety_value", r.safety_value},
                   {"scenario", to_json(r.scenario)},
                   {"trace", trace}});
    }
}

void write_histogram_csv(const std::string& path, const std::vector<double>& values,
                         int bins, double cutoff, double certified) {
    if (values.empty()) throw std::invalid_argument("histogram: no values");
    if (bins < 1) throw std::invalid_argument("histogram: bins < 1");
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    // Degenerate spread still gets a well-formed single-width binning.
    const double width = std::max((*hi_it - lo) / bins, 1e-12);

    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (const double v : values) {
        auto b = static_cast<std::int64_t>((v - lo) / width);
        b = std::clamp<std::int64_t>(b, 0, bins - 1);
        ++counts[static_cast<std::size_t>(b)];
    }

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << "bin_left,bin_right,count\n";
    out.precision(17);
    for (int b = 0; b < bins; ++b)
        out << lo + b * width << ',' << lo + (b + 1) * width << ','
            << counts[static_cast<std::size_t>(b)] << '\n';
    out << "footer," << cutoff << ',' << certified << '\n';
}

}  // namespace gapcert
