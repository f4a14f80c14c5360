// Command-line front end for the certification pipeline.
//
// Exit codes: 0 success, 2 a certificate or validation check failed,
// 3 configuration problem (bad flags, bad config file, unusable inputs),
// 4 simulation failure.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"

#include "gapcert/commands.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string profile = "robotarium";
    std::string out_dir = "./out";
    std::uint64_t seed = 0;
    int workers = 1;
    std::string gap_result;
    std::string verify_result;
    bool force = false;
};

void add_common(CLI::App* sub, Options& o) {
    auto* config = sub->add_option("--config", o.config_path,
                                   "JSON configuration file");
    config->check(CLI::ExistingFile);
    sub->add_option("--profile", o.profile,
                    "built-in profile when no --config is given "
                    "(robotarium or quadruped)")
        ->excludes(config);
    sub->add_option("--seed", o.seed, "override the master seed");
    sub->add_option("--out", o.out_dir, "output directory")
        ->capture_default_str();
    sub->add_option("--workers", o.workers, "worker threads")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
}

gapcert::CommandContext make_context(const CLI::App* sub, const Options& o) {
    gapcert::CommandContext ctx;
    ctx.config = o.config_path.empty() ? gapcert::default_config(o.profile)
                                       : gapcert::load_config(o.config_path);
    if (sub->count("--seed") > 0) {
        ctx.config.master_seed = o.seed;
        ctx.config.finalize();  // the seed is part of the config hash
    }
    ctx.out_dir = o.out_dir;
    ctx.workers = o.workers;
    return ctx;
}

std::string default_in(const std::string& explicit_path, const std::string& out_dir,
                       const char* name) {
    return explicit_path.empty() ? out_dir + "/" + name : explicit_path;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scenario-based sim2real gap certification"};
    app.require_subcommand(1);
    Options o;

    auto* gap = app.add_subcommand(
        "estimate-gap", "sample the plant-vs-model gap and certify the maximum");
    add_common(gap, o);

    auto* coverage = app.add_subcommand(
        "coverage", "check fresh plant steps against the certified ball");
    add_common(coverage, o);
    coverage->add_option("--gap-result", o.gap_result,
                         "gap result file (default <out>/gap_result.json)");

    auto* verify = app.add_subcommand(
        "verify", "certify the controller's minimum safety value");
    add_common(verify, o);
    verify->add_option("--gap-result", o.gap_result,
                       "gap result file (default <out>/gap_result.json)");

    auto* validate = app.add_subcommand(
        "validate", "out-of-sample validation of both certificates");
    add_common(validate, o);
    validate->add_option("--gap-result", o.gap_result,
                         "gap result file (default <out>/gap_result.json)");
    validate->add_option("--verify-result", o.verify_result,
                         "verification result file "
                         "(default <out>/verify_result.json)");

    auto* deploy = app.add_subcommand(
        "deploy", "closed-loop deployment runs on the surrogate plant");
    add_common(deploy, o);
    deploy->add_option("--verify-result", o.verify_result,
                       "verification result file "
                       "(default <out>/verify_result.json)");
    deploy->add_flag("--force", o.force,
                     "deploy even when verification failed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (app.got_subcommand(gap)) {
            return gapcert::cmd_estimate_gap(make_context(gap, o));
        }
        if (app.got_subcommand(coverage)) {
            return gapcert::cmd_coverage(
                make_context(coverage, o),
                default_in(o.gap_result, o.out_dir, "gap_result.json"));
        }
        if (app.got_subcommand(verify)) {
            return gapcert::cmd_verify(
                make_context(verify, o),
                default_in(o.gap_result, o.out_dir, "gap_result.json"));
        }
        if (app.got_subcommand(validate)) {
            return gapcert::cmd_validate(
                make_context(validate, o),
                default_in(o.gap_result, o.out_dir, "gap_result.json"),
                default_in(o.verify_result, o.out_dir, "verify_result.json"));
        }
        if (app.got_subcommand(deploy)) {
            return gapcert::cmd_deploy(
                make_context(deploy, o),
                default_in(o.verify_result, o.out_dir, "verify_result.json"),
                o.force);
        }
    } catch (const gapcert::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return 4;
    }
    return 3;  // unreachable: require_subcommand(1) guarantees a branch above
}
