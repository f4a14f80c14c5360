#pragma once

// Scenario-optimization guarantees. A scenario program solved on N i.i.d.
// samples has, with confidence 1 - B(N, d, eps), violation probability at
// most eps, where B is the binomial tail bound implemented here and d is
// the number of decision variables. The scalar (d = 1) case used for gap
// estimation reduces to confidence 1 - (1 - eps)^N.

#include <cstdint>
#include <vector>

namespace gapcert {

// Guarantee attached to a scenario-program solution.
struct Certificate {
    std::int64_t sample_count = 0;
    double epsilon = 0.0;      // violation level
    double confidence = 0.0;   // 1 - violation_bound(sample_count, dimension, epsilon)
    std::int64_t dimension = 1;
};

// Probability that the scenario solution violates more than an eps fraction
// of the sample space: sum_{i=0}^{d-1} C(n,i) eps^i (1-eps)^(n-i).
// Evaluated in log space so large n / small eps cannot overflow.
double violation_bound(std::int64_t n, std::int64_t d, double epsilon);

// Confidence of the scalar (d = 1) program, 1 - (1-eps)^n, computed by
// delegating to violation_bound so the two can never drift apart.
double confidence_scalar(std::int64_t n, double epsilon);

// Smallest N with (1-eps)^N <= beta, i.e. the sample count at which the
// scalar program reaches confidence 1 - beta.
std::int64_t required_samples(double epsilon, double beta);

Certificate make_certificate(std::int64_t sample_count, double epsilon,
                             std::int64_t dimension = 1);

// Checks confidence == 1 - violation_bound(... ) to within tol.
bool certificate_consistent(const Certificate& c, double tol = 1e-12);

// Which side of a threshold counts as a violation.
enum class TailDirection { Above, Below };

// Which empirical quantile to extract.
enum class TailSide { Upper, Lower };

// Sample set kept sorted ascending, together with the seed that produced it.
class EmpiricalDistribution {
public:
    EmpiricalDistribution(std::vector<double> values, std::uint64_t source_seed);

    const std::vector<double>& values() const { return values_; }
    std::uint64_t source_seed() const { return seed_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<double> values_;
    std::uint64_t seed_;
};

// Fraction of samples strictly beyond the threshold (above or below).
double empirical_violation(const EmpiricalDistribution& dist, double threshold,
                           TailDirection direction);

// Nearest-rank quantile: Q(1-eps) for the upper tail, Q(eps) for the lower.
// At most an eps fraction of the samples lies strictly beyond the cutoff.
double empirical_cutoff(const EmpiricalDistribution& dist, double epsilon,
                        TailSide side);

}  // namespace gapcert
