#pragma once

// The five pipeline commands behind the CLI verbs. Each one runs a stage,
// writes its artifacts under the output directory, prints a one-line
// human-readable summary, and returns the process exit code: 0 on pass,
// 2 when a certificate or validation check fails. Configuration problems
// (including unusable input files) throw ConfigError; simulation failures
// propagate as other exceptions. The binary maps those to exit codes 3
// and 4.

#include <string>

#include "gapcert/config.hpp"

namespace gapcert {

struct CommandContext {
    ExperimentConfig config;
    std::string out_dir = "./out";
    int workers = 1;
};

// Samples the plant-vs-model gap and certifies the maximum.
int cmd_estimate_gap(const CommandContext& ctx);

// Fresh-sample containment check of the disturbance ball built from a
// previous gap run.
int cmd_coverage(const CommandContext& ctx, const std::string& gap_result_path);

// Scenario-samples the navigation controller under the uncertain model and
// certifies the minimum safety value.
int cmd_verify(const CommandContext& ctx, const std::string& gap_result_path);

// Out-of-sample validation of both certificates on disjoint fresh batches,
// with histogram CSVs for plotting.
int cmd_validate(const CommandContext& ctx, const std::string& gap_result_path,
                 const std::string& verify_result_path);

// Closed-loop deployment runs on the surrogate plant. Refuses to run from a
// failed verification unless forced; a forced report is marked unverified.
int cmd_deploy(const CommandContext& ctx, const std::string& verify_result_path,
               bool force);

}  // namespace gapcert
