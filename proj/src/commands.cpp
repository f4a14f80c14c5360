#include "gapcert/commands.hpp"

#include <cstdio>
#include <vector>

#include "gapcert/records.hpp"

namespace gapcert {

namespace {

// Input files produced under a different configuration would silently
// certify the wrong system, so the hash in the file must match.
GapResult load_gap_input(const CommandContext& ctx, const std::string& path) {
    GapResult r = read_gap_result(path);
    if (r.profile_name != ctx.config.profile.name)
        throw ConfigError("gap result '" + path + "' is for profile '" +
                          r.profile_name + "', config wants '" +
                          ctx.config.profile.name + "'");
    return r;
}

}  // namespace

int cmd_estimate_gap(const CommandContext& ctx) {
    const auto& cfg = ctx.config;
    auto samples = draw_comparison_samples(
        cfg.profile, static_cast<std::size_t>(cfg.gap.samples), cfg.master_seed,
        "gap", cfg.gap.chains, ctx.workers);
    GapResult result = estimate_gap(std::move(samples), cfg.gap.epsilon,
                                    cfg.profile.name, cfg.master_seed);
    write_gap_result(ctx.out_dir, result, cfg);
    std::printf(
        "gap %.9f m certified at epsilon %.4g with confidence %.6f "
        "(%lld samples, profile %s)\n",
        result.gap, result.certificate.epsilon, result.certificate.confidence,
        static_cast<long long>(result.certificate.sample_count),
        result.profile_name.c_str());
    return 0;
}

int cmd_coverage(const CommandContext& ctx, const std::string& gap_result_path) {
    const auto& cfg = ctx.config;
    const GapResult gap = load_gap_input(ctx, gap_result_path);
    const DisturbanceSet set =
        disturbance_set_from(gap, cfg.profile.norm_weights);
    const CoverageReport report = coverage_test(
        cfg.profile, set, static_cast<std::size_t>(cfg.coverage.fresh_samples),
        gap.certificate.epsilon, cfg.master_seed, "coverage-fresh",
        cfg.gap.chains, ctx.workers);
    write_coverage_report(ctx.out_dir, report, cfg, cfg.master_seed);
    std::printf("coverage %zu/%zu (%.6f) against radius %.9f at epsilon %.4g: %s\n",
                report.contained, report.samples, report.fraction, report.radius,
                report.epsilon, report.pass ? "pass" : "FAIL");
    return report.pass ? 0 : 2;
}

int cmd_verify(const CommandContext& ctx, const std::string& gap_result_path) {
    const auto& cfg = ctx.config;
    const GapResult gap = load_gap_input(ctx, gap_result_path);
    const DisturbanceSet set =
        disturbance_set_from(gap, cfg.profile.norm_weights);
    const VerificationSetup setup = make_setup(cfg, set);
    const VerificationResult result =
        verify_controller(setup, cfg.verification.samples,
                          cfg.verification.epsilon, cfg.master_seed, ctx.workers);
    write_verification_result(ctx.out_dir, result, cfg);
    std::printf(
        "verified min safety %.6f over %lld scenarios at epsilon %.4g "
        "(confidence %.6f): %s\n",
        result.min_safety, static_cast<long long>(result.certificate.sample_count),
        result.certificate.epsilon, result.certificate.confidence,
        result.pass ? "pass" : "FAIL");
    return result.pass ? 0 : 2;
}

int cmd_validate(const CommandContext& ctx, const std::string& gap_result_path,
                 const std::string& verify_result_path) {
    const auto& cfg = ctx.config;
    const GapResult gap = load_gap_input(ctx, gap_result_path);
    const VerificationSummary verified =
        read_verification_summary(verify_result_path);
    if (verified.config_hash != cfg.config_hash)
        throw ConfigError("verification result '" + verify_result_path +
                          "' was produced under config " + verified.config_hash +
                          ", current config is " + cfg.config_hash);

    const auto fresh = draw_comparison_samples(
        cfg.profile, static_cast<std::size_t>(cfg.validation.fresh_gap_samples),
        cfg.master_seed, "validate-gap-fresh", cfg.gap.chains, ctx.workers);
    const GapValidation gap_check = validate_gap(gap, fresh);
    std::vector<double> fresh_gaps;
    fresh_gaps.reserve(fresh.size());
    for (const auto& s : fresh) fresh_gaps.push_back(s.gap_value);
    write_gap_validation(ctx.out_dir, gap_check, gap, cfg, fresh_gaps);
    std::printf("gap validation: violation %.6f vs epsilon %.4g on %zu fresh: %s\n",
                gap_check.violation, gap_check.epsilon, gap_check.fresh_count,
                gap_check.pass ? "pass" : "FAIL");

    const DisturbanceSet set =
        disturbance_set_from(gap, cfg.profile.norm_weights);
    const VerificationSetup setup = make_setup(cfg, set);
    std::vector<double> fresh_values;
    const SafetyValidation safety_check = validate_verification(
        setup, verified.min_safety, cfg.verification.epsilon,
        static_cast<std::size_t>(cfg.validation.fresh_safety_samples),
        cfg.master_seed, ctx.workers, &fresh_values);
    write_safety_validation(ctx.out_dir, safety_check, verified.min_safety, cfg,
                            fresh_values);
    std::printf(
        "safety validation: violation %.6f vs epsilon %.4g on %zu fresh: %s\n",
        safety_check.violation, safety_check.epsilon, safety_check.fresh_count,
        safety_check.pass ? "pass" : "FAIL");

    return (gap_check.pass && safety_check.pass) ? 0 : 2;
}

int cmd_deploy(const CommandContext& ctx, const std::string& verify_result_path,
               bool force) {
    const auto& cfg = ctx.config;
    const VerificationSummary verified =
        read_verification_summary(verify_result_path);
    if (verified.config_hash != cfg.config_hash)
        throw ConfigError("verification result '" + verify_result_path +
                          "' was produced under config " + verified.config_hash +
                          ", current config is " + cfg.config_hash);
    if (!verified.pass && !force) {
        std::printf(
            "refusing to deploy: verification failed (min safety %.6f); "
            "rerun with --force to override\n",
            verified.min_safety);
        return 2;
    }

    // The plant runs the real dynamics here, so the disturbance ball is not
    // consulted; a zero-radius set keeps the setup construction uniform.
    const VerificationSetup setup = make_setup(cfg, DisturbanceSet{});
    const DeploymentReport report = deploy_test(
        setup, cfg.deploy.runs, cfg.deploy.max_ticks, cfg.master_seed, ctx.workers);
    write_deployment_report(ctx.out_dir, report, cfg, cfg.master_seed,
                            verified.pass);
    std::printf("deployment: %lld/%zu runs reached the goal without crashing%s\n",
                static_cast<long long>(report.successes), report.runs.size(),
                verified.pass ? "" : " (UNVERIFIED controller, forced)");
    return report.successes == static_cast<std::int64_t>(report.runs.size()) ? 0
                                                                             : 2;
}

}  // namespace gapcert
