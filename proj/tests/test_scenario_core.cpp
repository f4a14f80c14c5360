#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gapcert/rng.hpp"
#include "gapcert/scenario_core.hpp"

using namespace gapcert;

// Reference values below were frozen from an independent implementation
// (exact rational arithmetic for the small cases, 64-bit floats elsewhere).

TEST_CASE("violation_bound matches closed forms") {
    // d = 1: bound is exactly (1-eps)^n.
    CHECK(violation_bound(600, 1, 0.005) ==
          doctest::Approx(0.0494138221100388).epsilon(1e-12));
    // Small case with an exact rational value: (C(10,0)+C(10,1)+C(10,2))/2^10.
    CHECK(std::abs(violation_bound(10, 3, 0.5) - 56.0 / 1024.0) < 1e-14);
    CHECK(std::abs(violation_bound(20, 5, 0.25) - 0.41484150253018015) < 1e-13);
}

TEST_CASE("violation_bound edge cases") {
    CHECK(violation_bound(5, 6, 0.1) == 1.0);   // fewer samples than variables
    CHECK(violation_bound(100, 3, 0.0) == 1.0);
    CHECK(violation_bound(100, 3, 1.0) == 0.0);
    CHECK(violation_bound(0, 1, 0.5) == 1.0);
    CHECK_THROWS_AS(violation_bound(10, 0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(violation_bound(-1, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(violation_bound(10, 1, 1.5), std::invalid_argument);
}

TEST_CASE("violation_bound stays in [0,1] and decreases in n") {
    RngStream rng(derive_seed(11, "vb-prop"));
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::int64_t>(1 + rng.uniform_index(5000));
        const auto d = static_cast<std::int64_t>(1 + rng.uniform_index(10));
        const double eps = rng.uniform(1e-4, 0.5);
        const double b = violation_bound(n, d, eps);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        CHECK(violation_bound(n + 50, d, eps) <= b + 1e-15);
        // Adding a decision variable can only weaken the bound.
        CHECK(violation_bound(n, d + 1, eps) >= b - 1e-15);
    }
}

TEST_CASE("confidence_scalar frozen values") {
    CHECK(std::abs(confidence_scalar(600, 0.005) - 0.9505861778899612) < 1e-12);
    CHECK(std::abs(confidence_scalar(100, 0.03) - 0.9524474920745942) < 1e-12);
    CHECK(std::abs(confidence_scalar(300, 0.01) - 0.9509591059287141) < 1e-12);
    // Identity with the d = 1 bound must be exact (same code path).
    CHECK(confidence_scalar(600, 0.005) == 1.0 - violation_bound(600, 1, 0.005));
}

TEST_CASE("required_samples hits the boundary exactly") {
    CHECK(required_samples(0.005, 0.05) == 598);
    CHECK(required_samples(0.01, 0.05) == 299);
    CHECK(required_samples(0.03, 0.05) == 99);
    CHECK(required_samples(0.5, 0.5) == 1);
    CHECK(required_samples(1.0, 0.5) == 1);
    CHECK_THROWS_AS(required_samples(0.0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(required_samples(0.01, 1.0), std::invalid_argument);
}

TEST_CASE("required_samples is minimal") {
    RngStream rng(derive_seed(12, "req-prop"));
    for (int trial = 0; trial < 100; ++trial) {
        const double eps = rng.uniform(0.001, 0.3);
        const double beta = rng.uniform(0.001, 0.5);
        const std::int64_t n = required_samples(eps, beta);
        CHECK(violation_bound(n, 1, eps) <= beta);
        if (n > 1) CHECK(violation_bound(n - 1, 1, eps) > beta);
    }
}

TEST_CASE("make_certificate is self-consistent") {
    const Certificate c = make_certificate(600, 0.005);
    CHECK(c.sample_count == 600);
    CHECK(c.dimension == 1);
    CHECK(certificate_consistent(c));
    CHECK(certificate_consistent(make_certificate(300, 0.01, 4)));

    Certificate broken = c;
    broken.confidence += 1e-9;
    CHECK_FALSE(certificate_consistent(broken));
}

TEST_CASE("EmpiricalDistribution sorts and keeps its seed") {
    EmpiricalDistribution d({3.0, 1.0, 2.0}, 42);
    CHECK(d.values() == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(d.source_seed() == 42);
    CHECK_THROWS_AS(EmpiricalDistribution({}, 0), std::invalid_argument);
}

TEST_CASE("empirical_violation counts strictly beyond the threshold") {
    EmpiricalDistribution d({1.0, 2.0, 2.0, 3.0, 4.0}, 0);
    CHECK(empirical_violation(d, 2.0, TailDirection::Above) == doctest::Approx(0.4));
    CHECK(empirical_violation(d, 2.0, TailDirection::Below) == doctest::Approx(0.2));
    CHECK(empirical_violation(d, 4.0, TailDirection::Above) == 0.0);
    CHECK(empirical_violation(d, 0.0, TailDirection::Above) == 1.0);
    CHECK(empirical_violation(d, 0.0, TailDirection::Below) == 0.0);
}

TEST_CASE("empirical_cutoff nearest rank") {
    // 1..100: the 5% upper cutoff is the 95th value, lower the 5th.
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i + 1.0;
    EmpiricalDistribution d(std::move(v), 0);
    CHECK(empirical_cutoff(d, 0.05, TailSide::Upper) == 95.0);
    CHECK(empirical_cutoff(d, 0.05, TailSide::Lower) == 5.0);
    CHECK(empirical_cutoff(d, 0.0, TailSide::Upper) == 100.0);
    CHECK(empirical_cutoff(d, 0.0, TailSide::Lower) == 1.0);

    // Cutoff must keep the strict-violation fraction at or under eps.
    RngStream rng(derive_seed(13, "cutoff-prop"));
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> samples;
        const std::size_t m = 10 + rng.uniform_index(500);
        samples.reserve(m);
        for (std::size_t i = 0; i < m; ++i) samples.push_back(rng.normal());
        EmpiricalDistribution dist(std::move(samples), 0);
        const double eps = rng.uniform(0.01, 0.3);
        const double up = empirical_cutoff(dist, eps, TailSide::Upper);
        const double lo = empirical_cutoff(dist, eps, TailSide::Lower);
        CHECK(empirical_violation(dist, up, TailDirection::Above) <= eps);
        CHECK(empirical_violation(dist, lo, TailDirection::Below) <= eps);
        CHECK(lo <= up);
    }
}

TEST_CASE("derived seeds separate streams") {
    CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
    CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
    CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
    CHECK(derive_seed(7, "x", 3) == derive_seed(7, "x", 3));
}

TEST_CASE("RngStream uniform and normal moments") {
    RngStream rng(derive_seed(99, "moments"));
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0;
    double umin = 1.0, umax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const double g = rng.normal();
        su += u;
        su2 += u * u;
        sn += g;
        sn2 += g * g;
        umin = std::min(umin, u);
        umax = std::max(umax, u);
    }
    CHECK(umin >= 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(sn / n == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}
