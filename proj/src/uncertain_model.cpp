#include "gapcert/uncertain_model.hpp"

#include <cmath>
#include <stdexcept>

namespace gapcert {

DisturbanceSet disturbance_set_from(const GapResult& result,
                                    const NormWeights& weights) {
    if (result.gap < 0.0)
        throw std::invalid_argument("disturbance_set_from: negative radius");
    if (weights.x <= 0.0 || weights.y <= 0.0 || weights.theta <= 0.0)
        throw std::invalid_argument("disturbance_set_from: weights must be positive");
    DisturbanceSet set;
    set.radius = result.gap;
    set.dim = 3;
    set.weights = weights;
    return set;
}

std::array<double, 3> sample_disturbance(const DisturbanceSet& set, RngStream& rng) {
    // Direction: normalized Gaussian triple; radius: r * U^(1/3) makes the
    // point uniform in the ball. Degenerate direction draws (all three
    // normals ~0) are astronomically unlikely but handled by resampling.
    double gx, gy, gt, n2;
    do {
        gx = rng.normal();
        gy = rng.normal();
        gt = rng.normal();
        n2 = gx * gx + gy * gy + gt * gt;
    } while (n2 < 1e-30);
    const double scale =
        set.radius * std::cbrt(rng.uniform()) / std::sqrt(n2);
    // Unit ball in the weighted norm: divide each axis by its weight.
    return {scale * gx / set.weights.x, scale * gy / set.weights.y,
            scale * gt / set.weights.theta};
}

double disturbance_norm(const std::array<double, 3>& d, const DisturbanceSet& set) {
    const double a = set.weights.x * d[0];
    const double b = set.weights.y * d[1];
    const double c = set.weights.theta * d[2];
    return std::sqrt(a * a + b * b + c * c);
}

ModelState uncertain_step(const ModelState& s, const ModelInput& u,
                          const std::array<double, 3>& d,
                          const DisturbanceSet& set,
                          const PlatformProfile& profile) {
    if (disturbance_norm(d, set) > set.radius * (1.0 + 1e-12) + 1e-15)
        throw std::invalid_argument("uncertain_step: disturbance outside the set");
    const ModelState nominal = nominal_step(s, u, profile).state;
    return {nominal.x + d[0], nominal.y + d[1],
            wrap_angle_2pi(nominal.theta + d[2])};
}

bool reachable_contains(const ModelState& s, const ModelInput& u,
                        const ModelState& point, const DisturbanceSet& set,
                        const PlatformProfile& profile) {
    const ModelState nominal = nominal_step(s, u, profile).state;
    return wrapped_state_distance(point, nominal, set.weights) <= set.radius;
}

UncertainTrajectory rollout(const ModelState& initial, const ControlLaw& law,
                            std::size_t horizon, const DisturbanceSet& set,
                            const PlatformProfile& profile, RngStream& rng,
                            std::uint64_t seed_label) {
    if (horizon < 1) throw std::invalid_argument("rollout: horizon < 1");
    if (!profile.state_box.contains(initial.x, initial.y))
        throw std::invalid_argument("rollout: initial state outside the workspace");

    UncertainTrajectory t;
    t.seed = seed_label;
    t.states.reserve(horizon + 1);
    t.inputs.reserve(horizon);
    t.disturbances.reserve(horizon);
    t.states.push_back(initial);
    for (std::size_t j = 0; j < horizon; ++j) {
        const ModelInput u = law(t.states.back(), j);
        if (!profile.input_box.contains(u))
            throw std::runtime_error(
                "rollout: controller commanded an input outside the input box");
        const auto d = sample_disturbance(set, rng);
        t.states.push_back(uncertain_step(t.states.back(), u, d, set, profile));
        t.inputs.push_back(u);
        t.disturbances.push_back(d);
    }
    return t;
}

CoverageReport coverage_test(const PlatformProfile& profile,
                             const DisturbanceSet& set, std::size_t num_samples,
                             double epsilon, std::uint64_t master_seed,
                             std::string_view stream_tag, int chains, int workers) {
    if (num_samples < 1) throw std::invalid_argument("coverage_test: no samples");
    const auto samples = draw_comparison_samples(profile, num_samples, master_seed,
                                                 stream_tag, chains, workers);
    CoverageReport r;
    r.samples = num_samples;
    r.epsilon = epsilon;
    r.radius = set.radius;
    for (const auto& s : samples) {
        if (reachable_contains(project_state(s.initial_state), s.model_input,
                               s.observed, set, profile))
            ++r.contained;
    }
    r.fraction = static_cast<double>(r.contained) / static_cast<double>(r.samples);
    r.pass = r.fraction >= 1.0 - epsilon;
    return r;
}

}  // namespace gapcert
