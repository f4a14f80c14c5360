#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "gapcert/dynamics.hpp"
#include "gapcert/uncertain_model.hpp"
#include "oracles.hpp"

using namespace gapcert;

namespace {

DisturbanceSet unit_ball(double radius) {
    GapResult r;
    r.gap = radius;
    return disturbance_set_from(r, NormWeights{});
}

}  // namespace

TEST_CASE("disturbance draws fill the ball uniformly") {
    const DisturbanceSet set = unit_ball(0.02);
    RngStream rng(2024);
    const std::size_t n = 100000;

    double mean_norm = 0.0;
    std::vector<std::int64_t> octants(8, 0);
    std::vector<std::int64_t> radial(10, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto d = sample_disturbance(set, rng);
        const double norm = disturbance_norm(d, set);
        REQUIRE(norm <= set.radius * (1.0 + 1e-12));
        mean_norm += norm;
        const int oct = (d[0] < 0.0 ? 1 : 0) | (d[1] < 0.0 ? 2 : 0) |
                        (d[2] < 0.0 ? 4 : 0);
        ++octants[static_cast<std::size_t>(oct)];
        // For a uniform ball, (norm / R)^3 is uniform on [0, 1].
        const double u = std::pow(norm / set.radius, 3.0);
        auto bin = static_cast<std::size_t>(u * 10.0);
        if (bin > 9) bin = 9;
        ++radial[bin];
    }
    mean_norm /= static_cast<double>(n);

    // E[norm] = 3R/4 for a uniform ball of radius R.
    CHECK(mean_norm / set.radius == doctest::Approx(0.75).epsilon(0.01));
    // 0.99 chi-square criticals: 18.475 at 7 dof, 21.666 at 9 dof.
    CHECK(oracle::chi_square_uniform(octants, static_cast<double>(n)) <
          18.475306906582357);
    CHECK(oracle::chi_square_uniform(radial, static_cast<double>(n)) <
          21.665994333461924);
}

TEST_CASE("norm weights rescale the ball axes") {
    GapResult r;
    r.gap = 0.1;
    const DisturbanceSet set = disturbance_set_from(r, NormWeights{2.0, 1.0, 0.5});
    CHECK(disturbance_norm({0.05, 0.0, 0.0}, set) == doctest::Approx(0.1));
    CHECK(disturbance_norm({0.0, 0.1, 0.0}, set) == doctest::Approx(0.1));
    CHECK(disturbance_norm({0.0, 0.0, 0.2}, set) == doctest::Approx(0.1));

    RngStream rng(55);
    for (int i = 0; i < 2000; ++i) {
        const auto d = sample_disturbance(set, rng);
        CHECK(disturbance_norm(d, set) <= set.radius * (1.0 + 1e-12));
        // Componentwise the weighted ball is a box of half-widths R / w.
        CHECK(std::abs(d[0]) <= 0.05 + 1e-12);
        CHECK(std::abs(d[1]) <= 0.10 + 1e-12);
        CHECK(std::abs(d[2]) <= 0.20 + 1e-12);
    }

    CHECK_THROWS_AS(disturbance_set_from(r, NormWeights{0.0, 1.0, 1.0}),
                    std::invalid_argument);
    r.gap = -0.1;
    CHECK_THROWS_AS(disturbance_set_from(r, NormWeights{}),
                    std::invalid_argument);
}

TEST_CASE("uncertain_step adds the disturbance and wraps the heading") {
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.1);
    const ModelState s{0.3, -0.2, kTwoPi - 0.001};
    const ModelInput u{0.1, 0.05};
    const std::array<double, 3> d{0.01, -0.02, 0.05};

    const ModelState nominal = nominal_step(s, u, profile).state;
    const ModelState stepped = uncertain_step(s, u, d, set, profile);
    CHECK(stepped.x == nominal.x + 0.01);
    CHECK(stepped.y == nominal.y - 0.02);
    CHECK(stepped.theta == doctest::Approx(wrap_angle_2pi(nominal.theta + 0.05)));
    CHECK(stepped.theta >= 0.0);
    CHECK(stepped.theta < kTwoPi);

    CHECK_THROWS_AS(uncertain_step(s, u, {0.2, 0.0, 0.0}, set, profile),
                    std::invalid_argument);
}

TEST_CASE("disturbed positions may leave the workspace") {
    // The nominal step clamps at the wall; the disturbance is applied after,
    // so the uncertain state can sit just outside. Walls are judged by the
    // safety layer, not silently erased here.
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.05);
    const ModelState s{profile.state_box.x.hi - 0.001, 0.0, 0.0};
    const ModelState stepped =
        uncertain_step(s, {0.2, 0.0}, {0.03, 0.0, 0.0}, set, profile);
    CHECK(stepped.x > profile.state_box.x.hi);
}

TEST_CASE("reachable membership straddles the ball boundary") {
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.01);
    RngStream rng(8);
    for (int i = 0; i < 200; ++i) {
        const ModelState s{rng.uniform(-1.0, 1.0), rng.uniform(-0.8, 0.8),
                           rng.uniform(0.0, kTwoPi)};
        const ModelInput u{rng.uniform(-0.2, 0.2), rng.uniform(-1.0, 1.0)};
        const ModelState nominal = nominal_step(s, u, profile).state;

        ModelState inside = nominal;
        inside.x += set.radius * (1.0 - 1e-6);
        ModelState outside = nominal;
        outside.x += set.radius * (1.0 + 1e-6);
        CHECK(reachable_contains(s, u, inside, set, profile));
        CHECK_FALSE(reachable_contains(s, u, outside, set, profile));
    }
}

TEST_CASE("rollouts replay bit-for-bit from the same seed") {
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.005);
    const ModelState x0{0.1, 0.2, 1.0};
    const auto law = [](const ModelState&, std::size_t) {
        return ModelInput{0.1, 0.2};
    };

    RngStream a(derive_seed(3, "roll", 0));
    RngStream b(derive_seed(3, "roll", 0));
    const auto ta = rollout(x0, law, 50, set, profile, a, 3);
    const auto tb = rollout(x0, law, 50, set, profile, b, 3);
    REQUIRE(ta.states.size() == 51);
    REQUIRE(ta.inputs.size() == 50);
    REQUIRE(ta.disturbances.size() == 50);
    for (std::size_t i = 0; i < ta.states.size(); ++i) {
        CHECK(ta.states[i].x == tb.states[i].x);
        CHECK(ta.states[i].y == tb.states[i].y);
        CHECK(ta.states[i].theta == tb.states[i].theta);
    }

    RngStream c(derive_seed(4, "roll", 0));
    const auto tc = rollout(x0, law, 50, set, profile, c, 4);
    CHECK(ta.states.back().x != tc.states.back().x);
}

TEST_CASE("every rollout step stays inside the certified ball") {
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.008);
    RngStream rng(17);
    const auto law = [](const ModelState&, std::size_t) {
        return ModelInput{0.05, -0.3};
    };
    const auto t = rollout({0.0, 0.0, 0.0}, law, 100, set, profile, rng, 17);
    for (std::size_t j = 0; j < t.inputs.size(); ++j) {
        CHECK(disturbance_norm(t.disturbances[j], set) <=
              set.radius * (1.0 + 1e-12));
        CHECK(reachable_contains(t.states[j], t.inputs[j], t.states[j + 1], set,
                                 profile));
    }
}

TEST_CASE("rollouts reject controllers that leave the input box") {
    const auto profile = robotarium_profile();
    const DisturbanceSet set = unit_ball(0.005);
    RngStream rng(1);
    const auto law = [&](const ModelState&, std::size_t) {
        return ModelInput{profile.input_box.v.hi + 0.1, 0.0};
    };
    CHECK_THROWS_AS(rollout({0.0, 0.0, 0.0}, law, 10, set, profile, rng, 1),
                    std::runtime_error);
    CHECK_THROWS_AS(rollout({0.0, 0.0, 0.0},
                            [](const ModelState&, std::size_t) {
                                return ModelInput{0.0, 0.0};
                            },
                            0, set, profile, rng, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(rollout({99.0, 0.0, 0.0},
                            [](const ModelState&, std::size_t) {
                                return ModelInput{0.0, 0.0};
                            },
                            10, set, profile, rng, 1),
                    std::invalid_argument);
}

TEST_CASE("coverage is total for an ideal plant and empty at radius zero") {
    PlatformProfile ideal = robotarium_profile();
    ideal.perturbation = PerturbationConfig{};

    DisturbanceSet tiny = unit_ball(1e-9);
    auto report = coverage_test(ideal, tiny, 120, 0.05, 21, "cov-ideal", 4, 2);
    CHECK(report.samples == 120);
    CHECK(report.contained == 120);
    CHECK(report.fraction == 1.0);
    CHECK(report.pass);

    // On the noisy plant a zero-radius set covers (essentially) nothing.
    const auto noisy = robotarium_profile();
    DisturbanceSet zero = unit_ball(0.0);
    report = coverage_test(noisy, zero, 120, 0.05, 21, "cov-zero", 4, 2);
    CHECK(report.fraction < 0.05);
    CHECK_FALSE(report.pass);

    CHECK_THROWS_AS(coverage_test(noisy, zero, 0, 0.05, 21, "cov", 4, 1),
                    std::invalid_argument);
}
