#pragma once

// Unicycle model, platform profiles, and the surrogate plant that stands in
// for hardware. The plant runs at a fine timestep with actuator lag, command
// gain error, slowly-varying slip, and pose noise; with every perturbation
// switched off it reproduces the coarse-step model exactly, so any measured
// model/plant mismatch comes from the perturbations alone.

#include <cstdint>
#include <string>

#include "gapcert/rng.hpp"

namespace gapcert {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Wrap into [0, 2*pi).
double wrap_angle_2pi(double a);

// Wrap into (-pi, pi].
double wrap_angle_pi(double a);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v, double tol = 0.0) const {
        return v >= lo - tol && v <= hi + tol;
    }
    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
    double width() const { return hi - lo; }
};

// Axis-aligned planar workspace; heading is unconstrained.
struct Box2 {
    Interval x;
    Interval y;

    bool contains(double px, double py, double tol = 0.0) const {
        return x.contains(px, tol) && y.contains(py, tol);
    }
};

struct ModelState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // [0, 2*pi)
};

struct ModelInput {
    double v = 0.0;      // m/s
    double omega = 0.0;  // rad/s
};

struct InputBox {
    Interval v;
    Interval omega;

    bool contains(const ModelInput& u, double tol = 1e-9) const {
        return v.contains(u.v, tol) && omega.contains(u.omega, tol);
    }
    ModelInput clamp(const ModelInput& u) const {
        return {v.clamp(u.v), omega.clamp(u.omega)};
    }
};

// Weights of the state metric; wrapped-angle term included so poses near the
// 0/2*pi seam compare correctly.
struct NormWeights {
    double x = 1.0;
    double y = 1.0;
    double theta = 1.0;
};

double wrapped_state_distance(const ModelState& a, const ModelState& b,
                              const NormWeights& w = {});

// Plant imperfections. All defaults off; unit gains and zero scales make
// the plant bit-for-bit equivalent to the nominal model (see plant_step).
struct PerturbationConfig {
    double actuator_tau = 0.0;    // first-order command lag [s]; 0 = instant
    double gain_v = 1.0;          // multiplicative miscalibration of v
    double gain_omega = 1.0;      // ... and of omega
    double pos_noise = 0.0;       // position noise density [m/sqrt(s)]
    double theta_noise = 0.0;     // heading noise density [rad/sqrt(s)]
    double slip_sigma = 0.0;      // stationary sd of the slip bias
    double slip_tau = 1.0;        // slip correlation time [s]

    bool is_identity() const;
};

// Waypoint-tracking knobs shared by the repositioning routine.
struct WaypointConfig {
    double k_rho = 0.8;
    double k_alpha = 1.5;
    double arrival_radius = 0.1;       // [m]
    std::int64_t step_budget = 10000;  // plant steps before giving up
};

// Everything that distinguishes one platform from another.
struct PlatformProfile {
    std::string name;
    Box2 state_box;
    InputBox input_box;
    double dt_true = 0.0;              // plant integration step [s]
    double dt_model = 0.0;             // model step [s]
    int steps_per_observation = 1;     // plant steps per model step (K)
    int mixing_steps = 0;              // plant steps between protocol samples
    bool walls_are_obstacles = false;  // leaving the workspace counts as a crash
    PerturbationConfig perturbation;
    WaypointConfig waypoint;
    NormWeights norm_weights;

    // Throws std::invalid_argument when timing or boxes are inconsistent
    // (dt_model must equal steps_per_observation * dt_true, etc).
    void validate() const;
};

PlatformProfile robotarium_profile();
PlatformProfile quadruped_profile();

struct StepResult {
    ModelState state;
    bool clamped = false;  // position hit the workspace boundary
};

// Euler step of the unicycle, position clamped into the workspace.
StepResult nominal_step(const ModelState& s, const ModelInput& u, double dt,
                        const Box2& box);

// Same, stepped at the profile's model rate.
StepResult nominal_step(const ModelState& s, const ModelInput& u,
                        const PlatformProfile& profile);

// Full plant state. Only the pose is observable; the rest is internal.
struct PlantState {
    ModelState pose;
    double v_actual = 0.0;       // lagged effective commands
    double omega_actual = 0.0;
    double slip_v = 0.0;         // slowly-varying command bias
    double slip_omega = 0.0;
    double latched_theta = 0.0;  // heading used for position within a segment
    int phase = 0;               // plant steps taken in the current model tick
    std::int64_t clamp_count = 0;
};

// State lift: a plant at rest at the given pose.
PlantState embed_state(const ModelState& s);

// Observation map: the pose component.
ModelState project_state(const PlantState& p);

struct PlantInput {
    double v_cmd = 0.0;
    double omega_cmd = 0.0;
};

// Input lift. Model inputs pass through unchanged on both platforms, but are
// validated against the input box first.
PlantInput extend_input(const ModelInput& u, const PlatformProfile& profile);

// One plant step at dt_true. At the start of each model tick the heading is
// latched and reused for position updates until the tick completes, which is
// what makes the zero-perturbation plant match the coarse model exactly.
PlantState plant_step(const PlantState& p, const PlantInput& u,
                      const PlatformProfile& profile, RngStream& rng);

// One model tick: K plant steps under a held command. Requires (and
// restores) tick alignment, i.e. p.phase == 0.
PlantState run_model_tick(const PlantState& p, const ModelInput& u,
                          const PlatformProfile& profile, RngStream& rng);

// O(x0, u): pose observed after one model tick of the plant.
ModelState observe(const PlantState& p, const ModelInput& u,
                   const PlatformProfile& profile, RngStream& rng);

// Clamped polar tracking law toward (wx, wy): rotate in place until the
// bearing error is small, then drive with speed proportional to distance.
ModelInput tracking_input(const ModelState& pose, double wx, double wy,
                          const WaypointConfig& wp, const InputBox& box);

// Drive the plant to within wp.arrival_radius of the waypoint, issuing one
// tracking command per model tick. The waypoint must lie inside the
// workspace; throws std::runtime_error when the step budget runs out.
PlantState goto_waypoint(PlantState p, double wx, double wy,
                         const PlatformProfile& profile, RngStream& rng);

}  // namespace gapcert
