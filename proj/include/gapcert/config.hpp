#pragma once

// Experiment configuration: one JSON document drives the whole pipeline.
// A named platform profile supplies every default; the file overrides only
// what it mentions. The canonical serialization of the merged result is
// hashed so outputs can state exactly which configuration produced them.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "gapcert/dynamics.hpp"
#include "gapcert/uncertain_model.hpp"
#include "gapcert/verification.hpp"

namespace gapcert {

// Anything wrong with configuration or input files; the CLI maps this to
// its config-error exit code.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GapConfig {
    std::int64_t samples = 600;
    double epsilon = 0.005;
    int chains = 8;  // fixed sampling chains; worker-count independent
};

struct CoverageConfig {
    std::int64_t fresh_samples = 1800;
};

struct VerificationConfig {
    std::int64_t samples = 300;
    double epsilon = 0.01;
    std::int64_t horizon = 200;
    ThetaSpec theta;
    ControllerConfig controller;
    SafetyConfig safety;
};

struct ValidationConfig {
    std::int64_t fresh_gap_samples = 1800;
    std::int64_t fresh_safety_samples = 20000;
    int histogram_bins = 40;
};

struct DeployConfig {
    std::int64_t runs = 40;
    std::int64_t max_ticks = 2000;
};

struct ExperimentConfig {
    std::uint64_t master_seed = 1;
    PlatformProfile profile;
    GapConfig gap;
    CoverageConfig coverage;
    VerificationConfig verification;
    ValidationConfig validation;
    DeployConfig deploy;
    std::string config_hash;  // filled by finalize()

    // Range checks everything and recomputes the hash. Throws ConfigError.
    void finalize();
};

// Built-in defaults for "robotarium" or "quadruped".
ExperimentConfig default_config(const std::string& profile_name);

// Canonical full serialization (every field, sorted keys).
nlohmann::json config_to_json(const ExperimentConfig& c);

// default_config(json["profile"]["name"]) patched with whatever else the
// document provides, then finalized.
ExperimentConfig config_from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);

// 16-hex-digit FNV-1a of a compact canonical dump.
std::string json_hash(const nlohmann::json& j);

// Verification/deployment campaign assembled from a config plus the
// disturbance set certified by a gap run.
VerificationSetup make_setup(const ExperimentConfig& c, const DisturbanceSet& set);

}  // namespace gapcert
