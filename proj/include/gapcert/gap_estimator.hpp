#pragma once

// Sim2real gap estimation. The plant is steered to random waypoints, probed
// with random held inputs, and each observation is compared against the
// model's one-step prediction. The certified gap is the scalar scenario
// solution — the sample maximum — with the confidence attached by
// scenario_core for d = 1.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gapcert/dynamics.hpp"
#include "gapcert/rng.hpp"
#include "gapcert/scenario_core.hpp"

namespace gapcert {

struct ComparisonSample {
    PlantState initial_state;  // full plant snapshot at x_0
    ModelInput model_input;
    ModelState observed;       // plant pose after one model tick
    ModelState predicted;      // model step from the same pose and input
    double gap_value = 0.0;    // wrapped_state_distance(observed, predicted)
};

struct GapResult {
    double gap = 0.0;  // certified sim2real gap (sample maximum)
    Certificate certificate;
    std::vector<ComparisonSample> samples;
    std::string profile_name;
    std::uint64_t master_seed = 0;
};

// One protocol draw: drive to a uniform waypoint, hold a uniform input for
// one model tick, record observed vs predicted, then keep holding the input
// for the remaining mixing steps so the next draw starts decorrelated.
// Returns the sample and the post-mixing plant for chaining.
std::pair<ComparisonSample, PlantState> draw_comparison_sample(
    const PlatformProfile& profile, const PlantState& plant, RngStream& rng);

// `count` chained draws split over `chains` independent chains seeded from
// (master_seed, stream_tag, chain). The chain partition is fixed up front,
// so the worker count changes wall time only, never the samples.
std::vector<ComparisonSample> draw_comparison_samples(
    const PlatformProfile& profile, std::size_t count, std::uint64_t master_seed,
    std::string_view stream_tag, int chains, int workers);

// Scalar scenario program over the sample gaps: gap = max, certificate for
// d = 1 at the given violation level.
GapResult estimate_gap(std::vector<ComparisonSample> samples, double epsilon,
                       std::string profile_name, std::uint64_t master_seed);

struct GapValidation {
    double violation = 0.0;   // fraction of fresh gaps strictly above the estimate
    double cutoff = 0.0;      // empirical (1 - eps) quantile of the fresh gaps
    double epsilon = 0.0;
    std::size_t fresh_count = 0;
    bool pass = false;        // violation <= epsilon
};

// Out-of-sample check of the certificate against a disjoint fresh batch.
GapValidation validate_gap(const GapResult& result,
                           const std::vector<ComparisonSample>& fresh);

}  // namespace gapcert
