#pragma once

// Deterministic random streams. Every unit of work (a sample chain, a
// trajectory, a validation batch) gets its own stream derived from the
// master seed and a name, so results never depend on thread scheduling
// or on how work is split across workers.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace gapcert {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Seed for the stream identified by (master, tag, index). Changing any of
// the three gives a statistically independent stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t index = 0) {
    std::uint64_t h = splitmix64(master ^ fnv1a64(tag));
    return splitmix64(h ^ 0x9e3779b97f4a7c15ULL * (index + 1));
}

// Random stream with portable output. mt19937_64's raw integer sequence is
// fixed by the standard; doubles are assembled here from the high 53 bits
// (and normals via Box-Muller) instead of going through <random>
// distributions, whose exact output is implementation-defined.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal, Box-Muller, two uniforms per draw (no cached spare,
    // so the draw count per call is fixed).
    double normal() {
        double u1 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;  // log(0) guard; probability ~2^-53
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform index in [0, n). Modulo bias is negligible for the small n
    // used here (grid cells, candidate lists).
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(next_u64() % n);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace gapcert
