#pragma once

// Serialization of results and sample logs. Result files are single JSON
// documents; sample logs are line-delimited JSON with a schema header line;
// histograms go to CSV for external plotting. Everything except the
// created_at stamp is a pure function of config + seed, so reruns produce
// byte-identical files.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "gapcert/config.hpp"
#include "gapcert/gap_estimator.hpp"
#include "gapcert/uncertain_model.hpp"
#include "gapcert/verification.hpp"

namespace gapcert {

nlohmann::json to_json(const ModelState& s);
nlohmann::json to_json(const Certificate& c);
nlohmann::json to_json(const Scenario& s);
nlohmann::json to_json(const SafetyValue& s);

void write_json_file(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json_file(const std::string& path);  // ConfigError on failure

// Line-delimited record stream; the first line is a header object carrying
// the schema name, config hash, and master seed.
class RecordWriter {
public:
    RecordWriter(const std::string& path, const std::string& schema,
                 const std::string& config_hash, std::uint64_t master_seed,
                 const nlohmann::json& extra = nlohmann::json::object());
    void write(const nlohmann::json& record);

private:
    std::ofstream out_;
};

// gap_result.json + gap_samples.jsonl under `dir`.
void write_gap_result(const std::string& dir, const GapResult& result,
                      const ExperimentConfig& config);

// Reads a gap result file back; the sample list is not reloaded (the gap,
// certificate, and provenance fields are all downstream consumers need).
GapResult read_gap_result(const std::string& path);

void write_coverage_report(const std::string& dir, const CoverageReport& report,
                           const ExperimentConfig& config, std::uint64_t seed);

// verify_result.json + verify_samples.jsonl under `dir`.
void write_verification_result(const std::string& dir,
                               const VerificationResult& result,
                               const ExperimentConfig& config);

struct VerificationSummary {
    double min_safety = 0.0;
    Certificate certificate;
    bool pass = false;
    std::uint64_t master_seed = 0;
    std::string config_hash;
};

VerificationSummary read_verification_summary(const std::string& path);

void write_gap_validation(const std::string& dir, const GapValidation& v,
                          const GapResult& result, const ExperimentConfig& config,
                          const std::vector<double>& fresh_gaps);

void write_safety_validation(const std::string& dir, const SafetyValidation& v,
                             double min_safety, const ExperimentConfig& config,
                             const std::vector<double>& fresh_values);

void write_deployment_report(const std::string& dir, const DeploymentReport& report,
                             const ExperimentConfig& config, std::uint64_t seed,
                             bool verified_input);

// Equal-width histogram CSV: header, `bins` rows of (bin_left, bin_right,
// count), and a footer row carrying the cutoff and the certified value.
void write_histogram_csv(const std::string& path, const std::vector<double>& values,
                         int bins, double cutoff, double certified);

}  // namespace gapcert
