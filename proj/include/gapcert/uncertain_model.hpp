#pragma once

// Uncertain model built from a certified gap: the nominal step inflated by
// an additive disturbance drawn uniformly from the ball of the certified
// radius. Also the one-step reachable set membership test and the coverage
// check that the real plant's observations land inside that set.

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "gapcert/dynamics.hpp"
#include "gapcert/gap_estimator.hpp"
#include "gapcert/rng.hpp"

namespace gapcert {

// Ball of admissible one-step disturbances, measured in the same wrapped
// state norm that produced the gap.
struct DisturbanceSet {
    double radius = 0.0;
    int dim = 3;
    NormWeights weights;
};

// The only sanctioned way to build a set: the radius and norm both come
// from the gap result, so the containment test below uses the metric the
// gap was certified in.
DisturbanceSet disturbance_set_from(const GapResult& result,
                                    const NormWeights& weights);

// Uniform draw from the ball: uniform direction, radius scaled by U^(1/3).
std::array<double, 3> sample_disturbance(const DisturbanceSet& set, RngStream& rng);

// Norm of a disturbance under the set's weights (wrap-free; disturbances are
// increments, not absolute headings).
double disturbance_norm(const std::array<double, 3>& d, const DisturbanceSet& set);

// f̂(x, u) + d with the heading renormalized into [0, 2*pi). The position is
// deliberately not re-clamped: walls are the verification layer's business.
ModelState uncertain_step(const ModelState& s, const ModelInput& u,
                          const std::array<double, 3>& d,
                          const DisturbanceSet& set,
                          const PlatformProfile& profile);

// Closed-ball membership in the one-step reachable set around f̂(s, u).
bool reachable_contains(const ModelState& s, const ModelInput& u,
                        const ModelState& point, const DisturbanceSet& set,
                        const PlatformProfile& profile);

struct UncertainTrajectory {
    std::vector<ModelState> states;                 // horizon + 1
    std::vector<ModelInput> inputs;                 // horizon
    std::vector<std::array<double, 3>> disturbances;  // horizon
    std::uint64_t seed = 0;
};

// Feedback law evaluated each step; the step index lets closures look up
// scenario context (moving obstacle positions) for that step.
using ControlLaw = std::function<ModelInput(const ModelState&, std::size_t)>;

// Closed-loop rollout of the uncertain model. The controller must stay
// inside the input box (violations throw); disturbances come from `rng`, one
// draw per step. `seed_label` is recorded for replay bookkeeping.
UncertainTrajectory rollout(const ModelState& initial, const ControlLaw& law,
                            std::size_t horizon, const DisturbanceSet& set,
                            const PlatformProfile& profile, RngStream& rng,
                            std::uint64_t seed_label);

struct CoverageReport {
    std::size_t samples = 0;
    std::size_t contained = 0;
    double fraction = 0.0;
    double epsilon = 0.0;
    double radius = 0.0;
    bool pass = false;  // fraction >= 1 - epsilon
};

// Draws fresh comparison samples from the plant and counts how many observed
// steps fall inside the uncertain model's one-step reachable set.
CoverageReport coverage_test(const PlatformProfile& profile,
                             const DisturbanceSet& set, std::size_t num_samples,
                             double epsilon, std::uint64_t master_seed,
                             std::string_view stream_tag, int chains, int workers);

}  // namespace gapcert
