#include "gapcert/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace gapcert {

double wrap_angle_2pi(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;  // fmod slack when a is a hair under a multiple
    return r;
}

double wrap_angle_pi(double a) {
    double r = wrap_angle_2pi(a);
    if (r > kTwoPi / 2.0) r -= kTwoPi;
    return r;
}

double wrapped_state_distance(const ModelState& a, const ModelState& b,
                              const NormWeights& w) {
    const double dx = w.x * (a.x - b.x);
    const double dy = w.y * (a.y - b.y);
    const double dt = w.theta * wrap_angle_pi(a.theta - b.theta);
    return std::sqrt(dx * dx + dy * dy + dt * dt);
}

bool PerturbationConfig::is_identity() const {
    return actuator_tau == 0.0 && gain_v == 1.0 && gain_omega == 1.0 &&
           pos_noise == 0.0 && theta_noise == 0.0 && slip_sigma == 0.0;
}

void PlatformProfile::validate() const {
    if (dt_true <= 0.0 || dt_model <= 0.0)
        throw std::invalid_argument("profile: timesteps must be positive");
    if (steps_per_observation < 1)
        throw std::invalid_argument("profile: steps_per_observation < 1");
    if (std::abs(steps_per_observation * dt_true - dt_model) > 1e-9)
        throw std::invalid_argument(
            "profile: dt_model must equal steps_per_observation * dt_true");
    if (state_box.x.width() <= 0.0 || state_box.y.width() <= 0.0)
        throw std::invalid_argument("profile: empty workspace box");
    if (input_box.v.width() < 0.0 || input_box.omega.width() < 0.0)
        throw std::invalid_argument("profile: empty input box");
    if (mixing_steps < steps_per_observation ||
        mixing_steps % steps_per_observation != 0)
        throw std::invalid_argument(
            "profile: mixing_steps must be a positive multiple of "
            "steps_per_observation");
    if (waypoint.step_budget < steps_per_observation ||
        waypoint.step_budget % steps_per_observation != 0)
        throw std::invalid_argument(
            "profile: waypoint budget must be a positive multiple of "
            "steps_per_observation");
    if (waypoint.arrival_radius <= 0.0)
        throw std::invalid_argument("profile: arrival radius must be positive");
    const auto& p = perturbation;
    if (p.actuator_tau < 0.0 || p.pos_noise < 0.0 || p.theta_noise < 0.0 ||
        p.slip_sigma < 0.0 || p.slip_tau <= 0.0 || p.gain_v <= 0.0 ||
        p.gain_omega <= 0.0)
        throw std::invalid_argument("profile: bad perturbation parameters");
}

PlatformProfile robotarium_profile() {
    PlatformProfile p;
    p.name = "robotarium";
    p.state_box = {{-1.6, 1.6}, {-1.0, 1.0}};
    p.input_box = {{-0.2, 0.2}, {-kTwoPi / 2.0, kTwoPi / 2.0}};
    p.dt_true = 0.033;
    p.dt_model = 0.033;
    p.steps_per_observation = 1;
    p.mixing_steps = 50;
    p.walls_are_obstacles = true;
    p.perturbation.actuator_tau = 0.006;
    p.perturbation.gain_v = 1.02;
    p.perturbation.gain_omega = 0.98;
    p.perturbation.pos_noise = 0.002;
    p.perturbation.theta_noise = 0.006;
    p.perturbation.slip_sigma = 0.006;
    p.perturbation.slip_tau = 2.0;
    p.waypoint.step_budget = 10000;
    return p;
}

PlatformProfile quadruped_profile() {
    PlatformProfile p;
    p.name = "quadruped";
    p.state_box = {{-2.5, 2.5}, {-2.5, 2.5}};
    p.input_box = {{-0.15, 0.15}, {-0.3, 0.3}};
    p.dt_true = 0.001;
    p.dt_model = 0.1;
    p.steps_per_observation = 100;
    p.mixing_steps = 1000;
    p.walls_are_obstacles = false;
    p.perturbation.actuator_tau = 0.025;
    p.perturbation.gain_v = 1.03;
    p.perturbation.gain_omega = 0.97;
    p.perturbation.pos_noise = 0.002;
    p.perturbation.theta_noise = 0.01;
    p.perturbation.slip_sigma = 0.006;
    p.perturbation.slip_tau = 3.0;
    p.waypoint.step_budget = 120000;  // omega is capped at 0.3 rad/s; turning is slow
    return p;
}

StepResult nominal_step(const ModelState& s, const ModelInput& u, double dt,
                        const Box2& box) {
    StepResult r;
    const double nx = s.x + u.v * std::cos(s.theta) * dt;
    const double ny = s.y + u.v * std::sin(s.theta) * dt;
    r.state.x = box.x.clamp(nx);
    r.state.y = box.y.clamp(ny);
    r.state.theta = wrap_angle_2pi(s.theta + u.omega * dt);
    r.clamped = r.state.x != nx || r.state.y != ny;
    return r;
}

StepResult nominal_step(const ModelState& s, const ModelInput& u,
                        const PlatformProfile& profile) {
    return nominal_step(s, u, profile.dt_model, profile.state_box);
}

PlantState embed_state(const ModelState& s) {
    PlantState p;
    p.pose = s;
    p.pose.theta = wrap_angle_2pi(s.theta);
    p.latched_theta = p.pose.theta;
    return p;
}

ModelState project_state(const PlantState& p) { return p.pose; }

PlantInput extend_input(const ModelInput& u, const PlatformProfile& profile) {
    if (!profile.input_box.contains(u))
        throw std::invalid_argument("extend_input: command outside the input box");
    return {u.v, u.omega};
}

PlantState plant_step(const PlantState& p, const PlantInput& u,
                      const PlatformProfile& profile, RngStream& rng) {
    const auto& pc = profile.perturbation;
    const double dt = profile.dt_true;
    PlantState n = p;

    if (n.phase == 0) n.latched_theta = n.pose.theta;

    // Slip bias: exact OU update, stationary sd = slip_sigma. The same five
    // normals are drawn per step regardless of the noise scales, so the
    // stream position never depends on the configuration.
    const double decay = std::exp(-dt / pc.slip_tau);
    const double kick = pc.slip_sigma * std::sqrt(1.0 - decay * decay);
    n.slip_v = n.slip_v * decay + kick * rng.normal();
    n.slip_omega = n.slip_omega * decay + kick * rng.normal();

    // Command path: miscalibrated gain, slip bias, first-order actuator lag.
    const double v_tgt = pc.gain_v * u.v_cmd + n.slip_v;
    const double w_tgt = pc.gain_omega * u.omega_cmd + n.slip_omega;
    if (pc.actuator_tau <= 0.0) {
        n.v_actual = v_tgt;
        n.omega_actual = w_tgt;
    } else {
        const double a = 1.0 - std::exp(-dt / pc.actuator_tau);
        n.v_actual += a * (v_tgt - n.v_actual);
        n.omega_actual += a * (w_tgt - n.omega_actual);
    }

    // Position advances along the heading latched at the start of the tick;
    // the heading itself integrates at the actual turn rate. Composing K of
    // these with perturbations off telescopes to one coarse Euler step.
    const double sdt = std::sqrt(dt);
    const double nx = n.pose.x + n.v_actual * std::cos(n.latched_theta) * dt +
                      pc.pos_noise * sdt * rng.normal();
    const double ny = n.pose.y + n.v_actual * std::sin(n.latched_theta) * dt +
                      pc.pos_noise * sdt * rng.normal();
    const double nt = n.pose.theta + n.omega_actual * dt +
                      pc.theta_noise * sdt * rng.normal();

    n.pose.x = profile.state_box.x.clamp(nx);
    n.pose.y = profile.state_box.y.clamp(ny);
    if (n.pose.x != nx || n.pose.y != ny) ++n.clamp_count;
    n.pose.theta = wrap_angle_2pi(nt);

    n.phase = (n.phase + 1) % profile.steps_per_observation;
    return n;
}

PlantState run_model_tick(const PlantState& p, const ModelInput& u,
                          const PlatformProfile& profile, RngStream& rng) {
    if (p.phase != 0)
        throw std::logic_error("run_model_tick: plant not tick-aligned");
    const PlantInput pu = extend_input(u, profile);
    PlantState s = p;
    for (int i = 0; i < profile.steps_per_observation; ++i)
        s = plant_step(s, pu, profile, rng);
    return s;
}

ModelState observe(const PlantState& p, const ModelInput& u,
                   const PlatformProfile& profile, RngStream& rng) {
    return project_state(run_model_tick(p, u, profile, rng));
}

ModelInput tracking_input(const ModelState& pose, double wx, double wy,
                          const WaypointConfig& wp, const InputBox& box) {
    const double dx = wx - pose.x;
    const double dy = wy - pose.y;
    const double rho = std::hypot(dx, dy);
    const double alpha = wrap_angle_pi(std::atan2(dy, dx) - pose.theta);
    ModelInput u;
    u.omega = box.omega.clamp(wp.k_alpha * alpha);
    // Rotate in place until roughly facing the waypoint, then drive.
    u.v = std::abs(alpha) > 1.1 ? 0.0
                                : box.v.clamp(wp.k_rho * rho * std::cos(alpha));
    return u;
}

PlantState goto_waypoint(PlantState p, double wx, double wy,
                         const PlatformProfile& profile, RngStream& rng) {
    if (p.phase != 0)
        throw std::logic_error("goto_waypoint: plant not tick-aligned");
    if (!profile.state_box.contains(wx, wy))
        throw std::invalid_argument("goto_waypoint: waypoint outside the workspace");
    const auto& wp = profile.waypoint;
    const std::int64_t ticks = wp.step_budget / profile.steps_per_observation;
    for (std::int64_t t = 0; t < ticks; ++t) {
        if (std::hypot(p.pose.x - wx, p.pose.y - wy) <= wp.arrival_radius)
            return p;
        p = run_model_tick(p, tracking_input(p.pose, wx, wy, wp, profile.input_box),
                           profile, rng);
    }
    if (std::hypot(p.pose.x - wx, p.pose.y - wy) <= wp.arrival_radius) return p;
    throw std::runtime_error("goto_waypoint: step budget exhausted");
}

}  // namespace gapcert
