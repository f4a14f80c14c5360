#pragma once

// Randomized navigation scenarios, the multi-level controller under test,
// the crash/progress safety metric, and the Monte Carlo harness that turns
// N closed-loop rollouts into a certified minimum safety value.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gapcert/dynamics.hpp"
#include "gapcert/rng.hpp"
#include "gapcert/scenario_core.hpp"
#include "gapcert/uncertain_model.hpp"

namespace gapcert {

struct Cell {
    int col = 0;
    int row = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

// Row-major ordering; used for canonical storage and BFS tie-breaking.
inline bool cell_less(const Cell& a, const Cell& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
}

// Scenario space parameters: grid shape plus obstacle/goal counts and the
// moving-obstacle behaviour knobs.
struct ThetaSpec {
    int grid_width = 0;
    int grid_height = 0;
    double cell_size = 0.0;
    int static_obstacles = 0;
    int goals = 0;
    int moving_obstacles = 0;
    double obstacle_speed = 0.1;    // m/s
    double heading_jitter = 0.3;    // rad per step, uniform increment
    double spawn_clearance = 0.5;   // min distance from the start-cell centre
    int rejection_budget = 1000;    // feasibility resampling attempts
};

ThetaSpec robotarium_theta();  // 8x5 cells of 0.4 m, 10 static, 3 goals, 3 moving
ThetaSpec quadruped_theta();   // 5x5 cells of 1.0 m, 5 static, 1 goal, none moving

// World placement of the grid: it must tile the workspace box exactly.
struct GridGeometry {
    int width = 0;
    int height = 0;
    double cell_size = 0.0;
    Box2 arena;

    double center_x(const Cell& c) const {
        return arena.x.lo + (c.col + 0.5) * cell_size;
    }
    double center_y(const Cell& c) const {
        return arena.y.lo + (c.row + 0.5) * cell_size;
    }
    // Cell containing a point, clamped into the grid for points outside.
    Cell cell_of(double x, double y) const;
    // Planar distance from a point to the (closed) cell rectangle.
    double cell_distance(const Cell& c, double x, double y) const;
};

GridGeometry make_grid(const ThetaSpec& theta, const Box2& arena);

struct ObstaclePose {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;
};

struct Scenario {
    int grid_width = 0;
    int grid_height = 0;
    double cell_size = 0.0;
    std::vector<Cell> static_obstacles;  // sorted row-major
    std::vector<Cell> goals;             // sorted row-major
    Cell start_cell;
    std::vector<ObstaclePose> moving_obstacles;
    std::uint64_t seed = 0;
};

// Rejection-samples obstacle/goal/start placements until a 4-connected path
// from start to some goal exists, then scatters moving obstacles over free
// space away from the start. Throws when the requested counts cannot fit
// the grid or the rejection budget runs out.
Scenario sample_scenario(const ThetaSpec& theta, const GridGeometry& grid,
                         RngStream& rng, std::uint64_t seed_label);

// Breadth-first shortest 4-connected path from start to the nearest goal,
// ties broken by row-major expansion order. Includes both endpoints.
std::vector<Cell> shortest_path(const Scenario& scenario);

// One random-walk step: heading jitter, constant speed, reflection off the
// arena walls.
ObstaclePose moving_obstacle_step(const ObstaclePose& p, double speed,
                                  double heading_jitter, double dt,
                                  const Box2& arena, RngStream& rng);

// Obstacle poses for steps 0..horizon (index 0 = the scenario's initial
// poses). Obstacles are ghosts to one another; only the agent can crash.
std::vector<std::vector<ObstaclePose>> simulate_obstacle_traces(
    const Scenario& scenario, const ThetaSpec& theta, std::size_t horizon,
    double dt, const Box2& arena, RngStream& rng);

// Controller knobs. The two-level structure: waypoints at path-cell centres
// tracked by the polar law, plus a forward gate and an evasion mode that
// picks the clearest escape bearing when a moving obstacle gets close.
struct ControllerConfig {
    double k_rho = 0.8;
    double k_alpha = 1.5;
    double capture_radius = 0.12;   // waypoint advance distance
    double stop_distance = 0.24;    // forward gate: start slowing here
    double hard_stop = 0.10;        // forward gate: full stop inside this
    double evade_radius = 0.34;     // moving obstacle closer than this -> evade
    double evade_exit = 0.40;       // hysteresis: evade until clear of this
    double evade_reach = 0.40;      // probe length when scoring escape bearings
    double align_gate = 1.1;        // no forward motion above this bearing error
    double static_margin = 0.03;    // clearance kept from static cells
    double wall_margin = 0.04;      // clearance kept from walls (when obstacles)
    double moving_margin = 0.04;    // clearance beyond the collision radius
    double collision_radius = 0.15; // matches the safety metric's default
    double retreat_margin = 0.05;   // hugging anything closer: back away
    double retreat_exit = 0.07;     // hysteresis: retreat until clear of this
};

ControllerConfig robotarium_controller();
ControllerConfig quadruped_controller();

// Stateful navigation law: advances along the shortest path, never commands
// anything outside the input box, and needs no randomness.
class NavigationController {
public:
    NavigationController(const Scenario& scenario, const GridGeometry& grid,
                         const ControllerConfig& config,
                         const PlatformProfile& profile);

    ModelInput step(const ModelState& s, std::span<const ObstaclePose> moving);

    bool done() const { return done_; }
    const std::vector<Cell>& path() const { return path_; }

private:
    double free_distance(const ModelState& s,
                         std::span<const ObstaclePose> moving) const;
    bool blocked_point(double x, double y,
                       std::span<const ObstaclePose> moving) const;
    double escape_bearing(const ModelState& s,
                          std::span<const ObstaclePose> moving,
                          double desired) const;
    double clearance(double x, double y,
                     std::span<const ObstaclePose> moving) const;
    double hazard_away(const ModelState& s, std::span<const ObstaclePose> moving,
                       double& away_x, double& away_y) const;

    const Scenario& scenario_;
    GridGeometry grid_;
    ControllerConfig cfg_;
    InputBox input_box_;
    bool walls_;
    std::vector<Cell> path_;
    std::size_t target_ = 0;  // first waypoint: the start cell's own centre
    bool done_ = false;
    bool evading_ = false;
    bool retreating_ = false;
};

// Safety metric configuration. progress_capture is the radius at which a
// planned-path cell centre counts as visited.
struct SafetyConfig {
    double collision_radius = 0.15;
    double static_inflation = 0.0;
    double progress_capture = 0.15;
};

struct SafetyValue {
    double value = 0.0;
    bool crashed = false;
    bool reached_goal = false;
    std::int64_t steps_used = 0;
};

// Incremental crash/progress evaluation: feed the pose at each step together
// with that step's moving-obstacle poses. Crash latches; progress counts
// path cells beyond the start, once each, in order.
class SafetyTracker {
public:
    SafetyTracker(const Scenario& scenario, const GridGeometry& grid,
                  const SafetyConfig& config, bool walls_are_obstacles);

    void feed(const ModelState& pose, std::span<const ObstaclePose> moving);

    bool crashed() const { return crashed_; }
    SafetyValue result() const;

private:
    const Scenario& scenario_;
    GridGeometry grid_;
    SafetyConfig cfg_;
    bool walls_;
    std::vector<Cell> path_;
    std::size_t next_idx_ = 1;
    bool crashed_ = false;
    std::int64_t steps_fed_ = 0;
    std::int64_t crash_step_ = -1;
};

// Value -1 on any crash (static cell, moving obstacle, or wall when walls
// count), otherwise cell_size times the path progress index.
SafetyValue safety_metric(std::span<const ModelState> poses,
                          const Scenario& scenario, const GridGeometry& grid,
                          const std::vector<std::vector<ObstaclePose>>& traces,
                          const SafetyConfig& config, bool walls_are_obstacles);

// Everything a verification or deployment campaign needs.
struct VerificationSetup {
    PlatformProfile profile;
    ThetaSpec theta;
    ControllerConfig controller;
    SafetyConfig safety;
    DisturbanceSet set;
    std::int64_t horizon = 200;
    std::string controller_id = "nav-polar-v1";
};

struct VerificationSample {
    std::uint64_t seed = 0;
    Scenario scenario;
    SafetyValue safety;
};

struct VerificationResult {
    double min_safety = 0.0;
    Certificate certificate;
    std::vector<VerificationSample> samples;
    std::string controller_id;
    std::uint64_t master_seed = 0;
    bool pass = false;  // min_safety >= 0
};

// N independent scenario/rollout draws under the uncertain model; the
// certified minimum safety value with a d = 1 certificate.
VerificationResult verify_controller(const VerificationSetup& setup,
                                     std::int64_t n, double epsilon,
                                     std::uint64_t master_seed, int workers);

// One fresh safety draw (scenario + rollout + metric); shared by the
// verification harness and its out-of-sample validation.
SafetyValue sample_safety_value(const VerificationSetup& setup,
                                std::uint64_t seed, Scenario* scenario_out);

struct SafetyValidation {
    double violation = 0.0;  // fraction of fresh values strictly below s*_N
    double cutoff = 0.0;     // empirical lower eps-quantile of fresh values
    double epsilon = 0.0;
    std::size_t fresh_count = 0;
    bool pass = false;       // violation <= epsilon
};

SafetyValidation validate_verification(const VerificationSetup& setup,
                                       double min_safety, double epsilon,
                                       std::size_t fresh_count,
                                       std::uint64_t master_seed, int workers,
                                       std::vector<double>* fresh_values = nullptr);

struct DeploymentRun {
    std::uint64_t seed = 0;
    bool success = false;  // reached the goal without crashing
    bool crashed = false;
    bool reached_goal = false;
    std::int64_t ticks_used = 0;
    double safety_value = 0.0;
    Scenario scenario;
    std::vector<ModelState> trace;  // projected plant pose per tick
};

struct DeploymentReport {
    std::vector<DeploymentRun> runs;
    std::int64_t successes = 0;
    std::int64_t max_ticks = 0;
};

// Closed-loop runs on the surrogate plant (not the uncertain model): the
// controller commands one input per model tick, obstacles random-walk live,
// and each run ends at goal capture, crash, or the tick budget.
DeploymentReport deploy_test(const VerificationSetup& setup, std::int64_t runs,
                             std::int64_t max_ticks, std::uint64_t master_seed,
                             int workers);

}  // namespace gapcert
