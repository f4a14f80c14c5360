#include "gapcert/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace gapcert {

namespace {

// Pull key if present, keeping the current value otherwise.
template <typename T>
void patch(const nlohmann::json& j, const char* key, T& value) {
    if (j.contains(key)) value = j.at(key).get<T>();
}

void patch_interval(const nlohmann::json& j, const char* key, Interval& iv) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 2)
        throw ConfigError(std::string("config: ") + key + " must be [lo, hi]");
    iv.lo = a[0].get<double>();
    iv.hi = a[1].get<double>();
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("config: " + what);
}

nlohmann::json interval_json(const Interval& iv) {
    return nlohmann::json::array({iv.lo, iv.hi});
}

}  // namespace

ExperimentConfig default_config(const std::string& profile_name) {
    ExperimentConfig c;
    if (profile_name == "robotarium") {
        c.profile = robotarium_profile();
        c.verification.theta = robotarium_theta();
        c.verification.controller = robotarium_controller();
        c.verification.safety = SafetyConfig{0.15, 0.0, 0.15};
        c.deploy = DeployConfig{40, 2000};
    } else if (profile_name == "quadruped") {
        c.profile = quadruped_profile();
        c.verification.theta = quadruped_theta();
        c.verification.controller = quadruped_controller();
        c.verification.safety = SafetyConfig{0.15, 0.0, 0.375};
        c.deploy = DeployConfig{10, 1500};
    } else {
        throw ConfigError("config: unknown profile '" + profile_name +
                          "' (expected robotarium or quadruped)");
    }
    c.finalize();
    return c;
}

void ExperimentConfig::finalize() {
    try {
        profile.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    require(gap.samples >= 1, "gap.samples must be >= 1");
    require(gap.epsilon > 0.0 && gap.epsilon < 1.0, "gap.epsilon must be in (0, 1)");
    require(gap.chains >= 1, "gap.chains must be >= 1");
    require(coverage.fresh_samples >= 1, "coverage.fresh_samples must be >= 1");
    require(verification.samples >= 1, "verification.samples must be >= 1");
    require(verification.epsilon > 0.0 && verification.epsilon < 1.0,
            "verification.epsilon must be in (0, 1)");
    require(verification.horizon >= 1, "verification.horizon must be >= 1");

    const auto& t = verification.theta;
    require(t.goals >= 1, "theta.goals must be >= 1");
    require(t.static_obstacles >= 0 && t.moving_obstacles >= 0,
            "theta obstacle counts must be >= 0");
    require(t.obstacle_speed >= 0.0, "theta.obstacle_speed must be >= 0");
    require(t.heading_jitter >= 0.0, "theta.heading_jitter must be >= 0");
    require(t.rejection_budget >= 1, "theta.rejection_budget must be >= 1");
    require(t.static_obstacles + t.goals + 1 <= t.grid_width * t.grid_height,
            "theta does not fit the grid");
    try {
        make_grid(t, profile.state_box);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    const auto& k = verification.controller;
    require(k.capture_radius > 0.0 && k.stop_distance > 0.0 && k.hard_stop > 0.0,
            "controller radii must be positive");
    require(k.hard_stop < k.stop_distance,
            "controller.hard_stop must be below stop_distance");
    require(k.evade_exit >= k.evade_radius,
            "controller.evade_exit must be >= evade_radius");
    require(k.k_rho > 0.0 && k.k_alpha > 0.0, "controller gains must be positive");
    require(k.retreat_margin >= 0.0 && k.retreat_exit >= k.retreat_margin,
            "controller.retreat_exit must be >= retreat_margin >= 0");

    const auto& s = verification.safety;
    require(s.collision_radius >= 0.0 && s.static_inflation >= 0.0 &&
                s.progress_capture > 0.0,
            "safety radii out of range");

    require(validation.fresh_gap_samples >= 1 &&
                validation.fresh_safety_samples >= 1,
            "validation sample counts must be >= 1");
    require(validation.histogram_bins >= 1, "validation.histogram_bins must be >= 1");
    require(deploy.runs >= 1, "deploy.runs must be >= 1");
    require(deploy.max_ticks >= 1, "deploy.max_ticks must be >= 1");

    config_hash.clear();
    config_hash = json_hash(config_to_json(*this));
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    const auto& p = c.profile;
    const auto& t = c.verification.theta;
    const auto& k = c.verification.controller;
    const auto& s = c.verification.safety;
    return {
        {"master_seed", c.master_seed},
        {"profile",
         {{"name", p.name},
          {"state_box", {{"x", interval_json(p.state_box.x)}, {"y", interval_json(p.state_box.y)}}},
          {"input_box", {{"v", interval_json(p.input_box.v)}, {"omega", interval_json(p.input_box.omega)}}},
          {"dt_true", p.dt_true},
          {"dt_model", p.dt_model},
          {"steps_per_observation", p.steps_per_observation},
          {"mixing_steps", p.mixing_steps},
          {"walls_are_obstacles", p.walls_are_obstacles},
          {"perturbation",
           {{"actuator_tau", p.perturbation.actuator_tau},
            {"gain_v", p.perturbation.gain_v},
            {"gain_omega", p.perturbation.gain_omega},
            {"pos_noise", p.perturbation.pos_noise},
            {"theta_noise", p.perturbation.theta_noise},
            {"slip_sigma", p.perturbation.slip_sigma},
            {"slip_tau", p.perturbation.slip_tau}}},
          {"waypoint",
           {{"k_rho", p.waypoint.k_rho},
            {"k_alpha", p.waypoint.k_alpha},
            {"arrival_radius", p.waypoint.arrival_radius},
            {"step_budget", p.waypoint.step_budget}}},
          {"norm_weights",
           {{"x", p.norm_weights.x}, {"y", p.norm_weights.y}, {"theta", p.norm_weights.theta}}}}},
        {"gap",
         {{"samples", c.gap.samples}, {"epsilon", c.gap.epsilon}, {"chains", c.gap.chains}}},
        {"coverage", {{"fresh_samples", c.coverage.fresh_samples}}},
        {"verification",
         {{"samples", c.verification.samples},
          {"epsilon", c.verification.epsilon},
          {"horizon", c.verification.horizon},
          {"theta",
           {{"grid_width", t.grid_width},
            {"grid_height", t.grid_height},
            {"cell_size", t.cell_size},
            {"static_obstacles", t.static_obstacles},
            {"goals", t.goals},
            {"moving_obstacles", t.moving_obstacles},
            {"obstacle_speed", t.obstacle_speed},
            {"heading_jitter", t.heading_jitter},
            {"spawn_clearance", t.spawn_clearance},
            {"rejection_budget", t.rejection_budget}}},
          {"controller",
           {{"k_rho", k.k_rho},
            {"k_alpha", k.k_alpha},
            {"capture_radius", k.capture_radius},
            {"stop_distance", k.stop_distance},
            {"hard_stop", k.hard_stop},
            {"evade_radius", k.evade_radius},
            {"evade_exit", k.evade_exit},
            {"evade_reach", k.evade_reach},
            {"align_gate", k.align_gate},
            {"static_margin", k.static_margin},
            {"wall_margin", k.wall_margin},
            {"moving_margin", k.moving_margin},
            {"collision_radius", k.collision_radius},
            {"retreat_margin", k.retreat_margin},
            {"retreat_exit", k.retreat_exit}}},
          {"safety",
           {{"collision_radius", s.collision_radius},
            {"static_inflation", s.static_inflation},
            {"progress_capture", s.progress_capture}}}}},
        {"validation",
         {{"fresh_gap_samples", c.validation.fresh_gap_samples},
          {"fresh_safety_samples", c.validation.fresh_safety_samples},
          {"histogram_bins", c.validation.histogram_bins}}},
        {"deploy", {{"runs", c.deploy.runs}, {"max_ticks", c.deploy.max_ticks}}}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: document must be an object");
    std::string name = "robotarium";
    if (j.contains("profile")) {
        const auto& p = j.at("profile");
        if (p.is_string())
            name = p.get<std::string>();
        else if (p.contains("name"))
            name = p.at("name").get<std::string>();
    }
    ExperimentConfig c = default_config(name);

    try {
        patch(j, "master_seed", c.master_seed);
        if (j.contains("profile") && j.at("profile").is_object()) {
            const auto& p = j.at("profile");
            auto& prof = c.profile;
            if (p.contains("state_box")) {
                patch_interval(p.at("state_box"), "x", prof.state_box.x);
                patch_interval(p.at("state_box"), "y", prof.state_box.y);
            }
            if (p.contains("input_box")) {
                patch_interval(p.at("input_box"), "v", prof.input_box.v);
                patch_interval(p.at("input_box"), "omega", prof.input_box.omega);
            }
            patch(p, "dt_true", prof.dt_true);
            patch(p, "dt_model", prof.dt_model);
            patch(p, "steps_per_observation", prof.steps_per_observation);
            patch(p, "mixing_steps", prof.mixing_steps);
            patch(p, "walls_are_obstacles", prof.walls_are_obstacles);
            if (p.contains("perturbation")) {
                const auto& q = p.at("perturbation");
                patch(q, "actuator_tau", prof.perturbation.actuator_tau);
                patch(q, "gain_v", prof.perturbation.gain_v);
                patch(q, "gain_omega", prof.perturbation.gain_omega);
                patch(q, "pos_noise", prof.perturbation.pos_noise);
                patch(q, "theta_noise", prof.perturbation.theta_noise);
                patch(q, "slip_sigma", prof.perturbation.slip_sigma);
                patch(q, "slip_tau", prof.perturbation.slip_tau);
            }
            if (p.contains("waypoint")) {
                const auto& q = p.at("waypoint");
                patch(q, "k_rho", prof.waypoint.k_rho);
                patch(q, "k_alpha", prof.waypoint.k_alpha);
                patch(q, "arrival_radius", prof.waypoint.arrival_radius);
                patch(q, "step_budget", prof.waypoint.step_budget);
            }
            if (p.contains("norm_weights")) {
                const auto& q = p.at("norm_weights");
                patch(q, "x", prof.norm_weights.x);
                patch(q, "y", prof.norm_weights.y);
                patch(q, "theta", prof.norm_weights.theta);
            }
        }
        if (j.contains("gap")) {
            const auto& g = j.at("gap");
            patch(g, "samples", c.gap.samples);
            patch(g, "epsilon", c.gap.epsilon);
            patch(g, "chains", c.gap.chains);
        }
        if (j.contains("coverage"))
            patch(j.at("coverage"), "fresh_samples", c.coverage.fresh_samples);
        if (j.contains("verification")) {
            const auto& v = j.at("verification");
            patch(v, "samples", c.verification.samples);
            patch(v, "epsilon", c.verification.epsilon);
            patch(v, "horizon", c.verification.horizon);
            if (v.contains("theta")) {
                const auto& t = v.at("theta");
                auto& th = c.verification.theta;
                patch(t, "grid_width", th.grid_width);
                patch(t, "grid_height", th.grid_height);
                patch(t, "cell_size", th.cell_size);
                patch(t, "static_obstacles", th.static_obstacles);
                patch(t, "goals", th.goals);
                patch(t, "moving_obstacles", th.moving_obstacles);
                patch(t, "obstacle_speed", th.obstacle_speed);
                patch(t, "heading_jitter", th.heading_jitter);
                patch(t, "spawn_clearance", th.spawn_clearance);
                patch(t, "rejection_budget", th.rejection_budget);
            }
            if (v.contains("controller")) {
                const auto& t = v.at("controller");
                auto& k = c.verification.controller;
                patch(t, "k_rho", k.k_rho);
                patch(t, "k_alpha", k.k_alpha);
                patch(t, "capture_radius", k.capture_radius);
                patch(t, "stop_distance", k.stop_distance);
                patch(t, "hard_stop", k.hard_stop);
                patch(t, "evade_radius", k.evade_radius);
                patch(t, "evade_exit", k.evade_exit);
                patch(t, "evade_reach", k.evade_reach);
                patch(t, "align_gate", k.align_gate);
                patch(t, "static_margin", k.static_margin);
                patch(t, "wall_margin", k.wall_margin);
                patch(t, "moving_margin", k.moving_margin);
                patch(t, "collision_radius", k.collision_radius);
                patch(t, "retreat_margin", k.retreat_margin);
                patch(t, "retreat_exit", k.retreat_exit);
            }
            if (v.contains("safety")) {
                const auto& t = v.at("safety");
                auto& s = c.verification.safety;
                patch(t, "collision_radius", s.collision_radius);
                patch(t, "static_inflation", s.static_inflation);
                patch(t, "progress_capture", s.progress_capture);
            }
        }
        if (j.contains("validation")) {
            const auto& v = j.at("validation");
            patch(v, "fresh_gap_samples", c.validation.fresh_gap_samples);
            patch(v, "fresh_safety_samples", c.validation.fresh_safety_samples);
            patch(v, "histogram_bins", c.validation.histogram_bins);
        }
        if (j.contains("deploy")) {
            const auto& d = j.at("deploy");
            patch(d, "runs", c.deploy.runs);
            patch(d, "max_ticks", c.deploy.max_ticks);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    c.finalize();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: parse error in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

std::string json_hash(const nlohmann::json& j) {
    const std::string canonical = j.dump();
    const std::uint64_t h = fnv1a64(canonical);
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

VerificationSetup make_setup(const ExperimentConfig& c, const DisturbanceSet& set) {
    VerificationSetup s;
    s.profile = c.profile;
    s.theta = c.verification.theta;
    s.controller = c.verification.controller;
    s.safety = c.verification.safety;
    s.set = set;
    s.horizon = c.verification.horizon;
    s.controller_id = "nav-polar/" + c.config_hash;
    return s;
}

}  // namespace gapcert
