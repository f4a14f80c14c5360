#pragma once

// Independent reference implementations the tests check the library against.
// Deliberately naive — Bellman relaxation sweeps, linear scans, textbook
// statistics — so they cannot share structure (or bugs) with the code under
// test.

#include <cstdint>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

#include "gapcert/gap_estimator.hpp"
#include "gapcert/verification.hpp"

namespace oracle {

// Shortest 4-connected distances from the start cell, by repeated full-grid
// relaxation until a sweep changes nothing. Unreachable or blocked cells
// keep the value -1.
inline std::vector<int> grid_distances(const gapcert::Scenario& sc) {
    const int w = sc.grid_width;
    const int h = sc.grid_height;
    const int inf = std::numeric_limits<int>::max() / 2;
    std::vector<char> blocked(static_cast<std::size_t>(w * h), 0);
    for (const auto& c : sc.static_obstacles)
        blocked[static_cast<std::size_t>(c.row * w + c.col)] = 1;

    std::vector<int> dist(static_cast<std::size_t>(w * h), inf);
    const int start = sc.start_cell.row * w + sc.start_cell.col;
    if (!blocked[static_cast<std::size_t>(start)]) dist[static_cast<std::size_t>(start)] = 0;

    bool changed = true;
    while (changed) {
        changed = false;
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const int idx = row * w + col;
                if (blocked[static_cast<std::size_t>(idx)]) continue;
                int best = dist[static_cast<std::size_t>(idx)];
                if (col > 0 && !blocked[static_cast<std::size_t>(idx - 1)])
                    best = std::min(best, dist[static_cast<std::size_t>(idx - 1)] + 1);
                if (col + 1 < w && !blocked[static_cast<std::size_t>(idx + 1)])
                    best = std::min(best, dist[static_cast<std::size_t>(idx + 1)] + 1);
                if (row > 0 && !blocked[static_cast<std::size_t>(idx - w)])
                    best = std::min(best, dist[static_cast<std::size_t>(idx - w)] + 1);
                if (row + 1 < h && !blocked[static_cast<std::size_t>(idx + w)])
                    best = std::min(best, dist[static_cast<std::size_t>(idx + w)] + 1);
                if (best < dist[static_cast<std::size_t>(idx)]) {
                    dist[static_cast<std::size_t>(idx)] = best;
                    changed = true;
                }
            }
        }
    }
    for (auto& d : dist)
        if (d >= inf) d = -1;
    return dist;
}

// Distance from start to the nearest goal, or -1 when no goal is reachable.
inline int goal_distance(const gapcert::Scenario& sc) {
    const auto dist = grid_distances(sc);
    int best = -1;
    for (const auto& g : sc.goals) {
        const int d = dist[static_cast<std::size_t>(g.row * sc.grid_width + g.col)];
        if (d >= 0 && (best < 0 || d < best)) best = d;
    }
    return best;
}

// True when `path` is a 4-connected obstacle-free route from the start cell
// to some goal cell.
inline bool valid_path(const gapcert::Scenario& sc,
                       const std::vector<gapcert::Cell>& path) {
    if (path.empty()) return false;
    if (!(path.front() == sc.start_cell)) return false;
    bool at_goal = false;
    for (const auto& g : sc.goals)
        if (path.back() == g) at_goal = true;
    if (!at_goal) return false;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto& c = path[i];
        if (c.col < 0 || c.col >= sc.grid_width || c.row < 0 ||
            c.row >= sc.grid_height)
            return false;
        for (const auto& o : sc.static_obstacles)
            if (c == o) return false;
        if (i > 0) {
            const int step = std::abs(c.col - path[i - 1].col) +
                             std::abs(c.row - path[i - 1].row);
            if (step != 1) return false;
        }
    }
    return true;
}

// Plain linear scan over the per-sample gap values.
inline double max_gap(const std::vector<gapcert::ComparisonSample>& samples) {
    double m = 0.0;
    for (const auto& s : samples)
        if (s.gap_value > m) m = s.gap_value;
    return m;
}

// Pearson statistic against equal expected counts.
inline double chi_square_uniform(const std::vector<std::int64_t>& observed,
                                 double total) {
    const double expected = total / static_cast<double>(observed.size());
    double stat = 0.0;
    for (const auto o : observed) {
        const double d = static_cast<double>(o) - expected;
        stat += d * d / expected;
    }
    return stat;
}

// Sample lag-1 autocorrelation.
inline double lag1_autocorrelation(const std::vector<double>& v) {
    const auto n = v.size();
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        den += (v[i] - mean) * (v[i] - mean);
        if (i + 1 < n) num += (v[i] - mean) * (v[i + 1] - mean);
    }
    return num / den;
}

}  // namespace oracle
