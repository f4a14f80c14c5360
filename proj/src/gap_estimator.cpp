#include "gapcert/gap_estimator.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gapcert/parallel.hpp"

namespace gapcert {

std::pair<ComparisonSample, PlantState> draw_comparison_sample(
    const PlatformProfile& profile, const PlantState& plant, RngStream& rng) {
    const auto& box = profile.state_box;

    // Reposition: uniform planar waypoint, tracked by the regulation law.
    const double wx = rng.uniform(box.x.lo, box.x.hi);
    const double wy = rng.uniform(box.y.lo, box.y.hi);
    PlantState at_start = goto_waypoint(plant, wx, wy, profile, rng);

    // Probe: uniform input held for one model tick.
    const ModelInput u{rng.uniform(profile.input_box.v.lo, profile.input_box.v.hi),
                       rng.uniform(profile.input_box.omega.lo,
                                   profile.input_box.omega.hi)};

    ComparisonSample s;
    s.initial_state = at_start;
    s.model_input = u;
    PlantState after = run_model_tick(at_start, u, profile, rng);
    s.observed = project_state(after);
    s.predicted = nominal_step(project_state(at_start), u, profile).state;
    s.gap_value =
        wrapped_state_distance(s.observed, s.predicted, profile.norm_weights);

    // Decorrelate: keep holding u for the rest of the mixing window.
    const int extra_ticks = (profile.mixing_steps - profile.steps_per_observation) /
                            profile.steps_per_observation;
    for (int t = 0; t < extra_ticks; ++t)
        after = run_model_tick(after, u, profile, rng);

    return {std::move(s), std::move(after)};
}

std::vector<ComparisonSample> draw_comparison_samples(
    const PlatformProfile& profile, std::size_t count, std::uint64_t master_seed,
    std::string_view stream_tag, int chains, int workers) {
    if (count == 0) throw std::invalid_argument("draw_comparison_samples: count 0");
    if (chains < 1) throw std::invalid_argument("draw_comparison_samples: chains < 1");

    const auto n_chains = std::min<std::size_t>(static_cast<std::size_t>(chains), count);
    const std::size_t base = count / n_chains;
    const std::size_t rem = count % n_chains;

    std::vector<ComparisonSample> out(count);
    run_indexed(n_chains, workers, [&](std::size_t c) {
        // Contiguous block [first, first + mine) for chain c.
        const std::size_t mine = base + (c < rem ? 1 : 0);
        const std::size_t first = c * base + std::min(c, rem);
        RngStream rng(derive_seed(master_seed, stream_tag, c));
        // Each chain starts from a parked plant at the workspace centre; the
        // first waypoint move mixes it into the sampling distribution.
        PlantState plant = embed_state(
            {(profile.state_box.x.lo + profile.state_box.x.hi) / 2.0,
             (profile.state_box.y.lo + profile.state_box.y.hi) / 2.0, 0.0});
        for (std::size_t i = 0; i < mine; ++i) {
            auto [sample, next] = draw_comparison_sample(profile, plant, rng);
            out[first + i] = std::move(sample);
            plant = std::move(next);
        }
    });
    return out;
}

GapResult estimate_gap(std::vector<ComparisonSample> samples, double epsilon,
                       std::string profile_name, std::uint64_t master_seed) {
    if (samples.empty()) throw std::invalid_argument("estimate_gap: no samples");
    GapResult r;
    r.gap = 0.0;
    for (const auto& s : samples) r.gap = std::max(r.gap, s.gap_value);
    r.certificate = make_certificate(static_cast<std::int64_t>(samples.size()),
                                     epsilon, 1);
    r.samples = std::move(samples);
    r.profile_name = std::move(profile_name);
    r.master_seed = master_seed;
    return r;
}

GapValidation validate_gap(const GapResult& result,
                           const std::vector<ComparisonSample>& fresh) {
    if (fresh.empty()) throw std::invalid_argument("validate_gap: no fresh samples");
    std::vector<double> gaps;
    gaps.reserve(fresh.size());
    for (const auto& s : fresh) gaps.push_back(s.gap_value);
    const EmpiricalDistribution dist(std::move(gaps), result.master_seed);

    GapValidation v;
    v.epsilon = result.certificate.epsilon;
    v.fresh_count = fresh.size();
    v.violation = empirical_violation(dist, result.gap, TailDirection::Above);
    v.cutoff = empirical_cutoff(dist, v.epsilon, TailSide::Upper);
    v.pass = v.violation <= v.epsilon;
    return v;
}

}  // namespace gapcert
