#include "gapcert/scenario_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gapcert {

double violation_bound(std::int64_t n, std::int64_t d, double epsilon) {
    if (n < 0) throw std::invalid_argument("violation_bound: n < 0");
    if (d < 1) throw std::invalid_argument("violation_bound: d < 1");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("violation_bound: epsilon outside [0, 1]");

    // Fewer samples than decision variables: the bound is vacuous.
    if (d > n) return 1.0;

    if (epsilon == 0.0) return 1.0;  // every term with i = 0 survives: (1-0)^n = 1
    if (epsilon == 1.0) return 0.0;  // all terms carry (1-eps)^(n-i) = 0 since d <= n

    // Running log of C(n, i); terms combined in log space.
    const double log_eps = std::log(epsilon);
    const double log_1m_eps = std::log1p(-epsilon);
    double log_binom = 0.0;  // log C(n, 0)
    double sum = 0.0;
    for (std::int64_t i = 0; i < d; ++i) {
        if (i > 0) {
            log_binom += std::log(static_cast<double>(n - i + 1)) -
                         std::log(static_cast<double>(i));
        }
        sum += std::exp(log_binom + static_cast<double>(i) * log_eps +
                        static_cast<double>(n - i) * log_1m_eps);
    }
    return std::clamp(sum, 0.0, 1.0);
}

double confidence_scalar(std::int64_t n, double epsilon) {
    return 1.0 - violation_bound(n, 1, epsilon);
}

std::int64_t required_samples(double epsilon, double beta) {
    if (epsilon <= 0.0 || epsilon > 1.0)
        throw std::invalid_argument("required_samples: epsilon outside (0, 1]");
    if (beta <= 0.0 || beta >= 1.0)
        throw std::invalid_argument("required_samples: beta outside (0, 1)");

    if (epsilon == 1.0) return 1;

    // (1-eps)^N <= beta  <=>  N >= log(beta) / log(1-eps).
    auto n = static_cast<std::int64_t>(
        std::ceil(std::log(beta) / std::log1p(-epsilon)));
    if (n < 1) n = 1;
    // Walk off any floating-point slack around the boundary.
    while (n > 1 && violation_bound(n - 1, 1, epsilon) <= beta) --n;
    while (violation_bound(n, 1, epsilon) > beta) ++n;
    return n;
}

Certificate make_certificate(std::int64_t sample_count, double epsilon,
                             std::int64_t dimension) {
    Certificate c;
    c.sample_count = sample_count;
    c.epsilon = epsilon;
    c.dimension = dimension;
    c.confidence = 1.0 - violation_bound(sample_count, dimension, epsilon);
    return c;
}

bool certificate_consistent(const Certificate& c, double tol) {
    const double expected =
        1.0 - violation_bound(c.sample_count, c.dimension, c.epsilon);
    return std::abs(c.confidence - expected) <= tol;
}

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values,
                                             std::uint64_t source_seed)
    : values_(std::move(values)), seed_(source_seed) {
    if (values_.empty())
        throw std::invalid_argument("EmpiricalDistribution: no samples");
    std::sort(values_.begin(), values_.end());
}

double empirical_violation(const EmpiricalDistribution& dist, double threshold,
                           TailDirection direction) {
    const auto& v = dist.values();
    std::size_t count;
    if (direction == TailDirection::Above) {
        count = v.end() - std::upper_bound(v.begin(), v.end(), threshold);
    } else {
        count = std::lower_bound(v.begin(), v.end(), threshold) - v.begin();
    }
    return static_cast<double>(count) / static_cast<double>(v.size());
}

double empirical_cutoff(const EmpiricalDistribution& dist, double epsilon,
                        TailSide side) {
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("empirical_cutoff: epsilon outside [0, 1]");
    const auto& v = dist.values();
    const auto m = static_cast<double>(v.size());
    // Nearest rank, 1-based; the 1e-9 nudge keeps exact products like
    // 0.95 * 100 from being rounded up a rank by floating-point noise.
    const double q = side == TailSide::Upper ? 1.0 - epsilon : epsilon;
    auto rank = static_cast<std::int64_t>(std::ceil(q * m - 1e-9));
    rank = std::clamp<std::int64_t>(rank, 1, static_cast<std::int64_t>(v.size()));
    return v[static_cast<std::size_t>(rank - 1)];
}

}  // namespace gapcert
