#include "gapcert/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "gapcert/parallel.hpp"

namespace gapcert {

namespace {

bool cell_in(const std::vector<Cell>& cells, const Cell& c) {
    return std::find(cells.begin(), cells.end(), c) != cells.end();
}

// BFS distances and parents over the free cells, 4-connected. Neighbors are
// expanded in row-major order, which fixes the tie-breaking everywhere.
void bfs(int w, int h, const std::vector<char>& blocked, const Cell& from,
         std::vector<int>& dist, std::vector<int>& parent) {
    const int n = w * h;
    dist.assign(n, -1);
    parent.assign(n, -1);
    const int s = from.row * w + from.col;
    if (blocked[s]) return;
    std::queue<int> q;
    dist[s] = 0;
    q.push(s);
    while (!q.empty()) {
        const int cur = q.front();
        q.pop();
        const int col = cur % w;
        const int row = cur / w;
        const int dc[4] = {0, -1, 1, 0};  // (row-1), (col-1), (col+1), (row+1)
        const int dr[4] = {-1, 0, 0, 1};
        for (int k = 0; k < 4; ++k) {
            const int nc = col + dc[k];
            const int nr = row + dr[k];
            if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
            const int idx = nr * w + nc;
            if (blocked[idx] || dist[idx] >= 0) continue;
            dist[idx] = dist[cur] + 1;
            parent[idx] = cur;
            q.push(idx);
        }
    }
}

std::vector<char> blocked_mask(const Scenario& sc) {
    std::vector<char> blocked(
        static_cast<std::size_t>(sc.grid_width * sc.grid_height), 0);
    for (const auto& c : sc.static_obstacles)
        blocked[static_cast<std::size_t>(c.row * sc.grid_width + c.col)] = 1;
    return blocked;
}

void check_scenario_cells(const Scenario& sc) {
    auto in_range = [&](const Cell& c) {
        return c.col >= 0 && c.col < sc.grid_width && c.row >= 0 &&
               c.row < sc.grid_height;
    };
    if (!in_range(sc.start_cell))
        throw std::invalid_argument("scenario: start cell out of range");
    for (const auto& c : sc.static_obstacles)
        if (!in_range(c)) throw std::invalid_argument("scenario: obstacle out of range");
    for (const auto& c : sc.goals)
        if (!in_range(c)) throw std::invalid_argument("scenario: goal out of range");
    if (sc.goals.empty()) throw std::invalid_argument("scenario: no goals");
}

}  // namespace

ThetaSpec robotarium_theta() {
    ThetaSpec t;
    t.grid_width = 8;
    t.grid_height = 5;
    t.cell_size = 0.4;
    t.static_obstacles = 10;
    t.goals = 3;
    t.moving_obstacles = 3;
    return t;
}

ThetaSpec quadruped_theta() {
    ThetaSpec t;
    t.grid_width = 5;
    t.grid_height = 5;
    t.cell_size = 1.0;
    t.static_obstacles = 5;
    t.goals = 1;
    t.moving_obstacles = 0;
    return t;
}

Cell GridGeometry::cell_of(double x, double y) const {
    auto idx = [](double v, double lo, double cell, int n) {
        int i = static_cast<int>(std::floor((v - lo) / cell));
        return std::clamp(i, 0, n - 1);
    };
    return {idx(x, arena.x.lo, cell_size, width),
            idx(y, arena.y.lo, cell_size, height)};
}

double GridGeometry::cell_distance(const Cell& c, double x, double y) const {
    const double lx = arena.x.lo + c.col * cell_size;
    const double ly = arena.y.lo + c.row * cell_size;
    const double dx = std::max({lx - x, 0.0, x - (lx + cell_size)});
    const double dy = std::max({ly - y, 0.0, y - (ly + cell_size)});
    return std::sqrt(dx * dx + dy * dy);
}

GridGeometry make_grid(const ThetaSpec& theta, const Box2& arena) {
    if (theta.grid_width < 1 || theta.grid_height < 1 || theta.cell_size <= 0.0)
        throw std::invalid_argument("make_grid: bad grid shape");
    if (std::abs(theta.grid_width * theta.cell_size - arena.x.width()) > 1e-9 ||
        std::abs(theta.grid_height * theta.cell_size - arena.y.width()) > 1e-9)
        throw std::invalid_argument("make_grid: grid does not tile the workspace");
    return {theta.grid_width, theta.grid_height, theta.cell_size, arena};
}

Scenario sample_scenario(const ThetaSpec& theta, const GridGeometry& grid,
                         RngStream& rng, std::uint64_t seed_label) {
    if (theta.static_obstacles < 0 || theta.goals < 1 || theta.moving_obstacles < 0)
        throw std::invalid_argument("sample_scenario: bad counts");
    const int n_cells = theta.grid_width * theta.grid_height;
    const int need = theta.static_obstacles + theta.goals + 1;
    if (need > n_cells)
        throw std::invalid_argument("sample_scenario: spec does not fit the grid");

    Scenario sc;
    sc.grid_width = theta.grid_width;
    sc.grid_height = theta.grid_height;
    sc.cell_size = theta.cell_size;
    sc.seed = seed_label;

    std::vector<int> pool(static_cast<std::size_t>(n_cells));
    std::vector<int> dist, parent;
    bool feasible = false;
    for (int attempt = 0; attempt < theta.rejection_budget && !feasible; ++attempt) {
        // Distinct uniform cells via a partial Fisher-Yates shuffle:
        // obstacles first, then goals, then the start cell.
        std::iota(pool.begin(), pool.end(), 0);
        for (int i = 0; i < need; ++i) {
            const auto j = i + static_cast<int>(rng.uniform_index(
                                   static_cast<std::size_t>(n_cells - i)));
            std::swap(pool[static_cast<std::size_t>(i)],
                      pool[static_cast<std::size_t>(j)]);
        }
        auto cell_at = [&](int i) {
            return Cell{pool[static_cast<std::size_t>(i)] % theta.grid_width,
                        pool[static_cast<std::size_t>(i)] / theta.grid_width};
        };
        sc.static_obstacles.clear();
        sc.goals.clear();
        for (int i = 0; i < theta.static_obstacles; ++i)
            sc.static_obstacles.push_back(cell_at(i));
        for (int i = 0; i < theta.goals; ++i)
            sc.goals.push_back(cell_at(theta.static_obstacles + i));
        sc.start_cell = cell_at(need - 1);
        std::sort(sc.static_obstacles.begin(), sc.static_obstacles.end(), cell_less);
        std::sort(sc.goals.begin(), sc.goals.end(), cell_less);

        bfs(theta.grid_width, theta.grid_height, blocked_mask(sc), sc.start_cell,
            dist, parent);
        for (const auto& g : sc.goals)
            if (dist[static_cast<std::size_t>(g.row * theta.grid_width + g.col)] >= 0)
                feasible = true;
    }
    if (!feasible)
        throw std::runtime_error(
            "sample_scenario: rejection budget exhausted without a feasible layout");

    // Moving obstacles: uniform free poses away from the start cell.
    const double sx = grid.center_x(sc.start_cell);
    const double sy = grid.center_y(sc.start_cell);
    for (int k = 0; k < theta.moving_obstacles; ++k) {
        bool placed = false;
        for (int t = 0; t < 200 && !placed; ++t) {
            ObstaclePose p{rng.uniform(grid.arena.x.lo, grid.arena.x.hi),
                           rng.uniform(grid.arena.y.lo, grid.arena.y.hi),
                           rng.uniform(0.0, kTwoPi)};
            if (std::hypot(p.x - sx, p.y - sy) < theta.spawn_clearance) continue;
            if (cell_in(sc.static_obstacles, grid.cell_of(p.x, p.y))) continue;
            sc.moving_obstacles.push_back(p);
            placed = true;
        }
        if (!placed)
            throw std::runtime_error(
                "sample_scenario: no room for moving obstacles");
    }
    return sc;
}

std::vector<Cell> shortest_path(const Scenario& sc) {
    check_scenario_cells(sc);
    std::vector<int> dist, parent;
    bfs(sc.grid_width, sc.grid_height, blocked_mask(sc), sc.start_cell, dist,
        parent);

    // Nearest goal; ties resolved row-major so the result is reproducible.
    int best = -1, best_d = std::numeric_limits<int>::max();
    for (const auto& g : sc.goals) {
        const int idx = g.row * sc.grid_width + g.col;
        const int d = dist[static_cast<std::size_t>(idx)];
        if (d >= 0 && d < best_d) {
            best_d = d;
            best = idx;
        }
    }
    if (best < 0)
        throw std::invalid_argument("shortest_path: no goal reachable");

    std::vector<Cell> path;
    for (int cur = best; cur >= 0; cur = parent[static_cast<std::size_t>(cur)])
        path.push_back({cur % sc.grid_width, cur / sc.grid_width});
    std::reverse(path.begin(), path.end());
    return path;
}

ObstaclePose moving_obstacle_step(const ObstaclePose& p, double speed,
                                  double heading_jitter, double dt,
                                  const Box2& arena, RngStream& rng) {
    double th = wrap_angle_2pi(p.theta +
                               rng.uniform(-heading_jitter, heading_jitter));
    double x = p.x + speed * std::cos(th) * dt;
    double y = p.y + speed * std::sin(th) * dt;
    const double pi = kTwoPi / 2.0;
    if (x < arena.x.lo) {
        x = 2.0 * arena.x.lo - x;
        th = wrap_angle_2pi(pi - th);
    } else if (x > arena.x.hi) {
        x = 2.0 * arena.x.hi - x;
        th = wrap_angle_2pi(pi - th);
    }
    if (y < arena.y.lo) {
        y = 2.0 * arena.y.lo - y;
        th = wrap_angle_2pi(-th);
    } else if (y > arena.y.hi) {
        y = 2.0 * arena.y.hi - y;
        th = wrap_angle_2pi(-th);
    }
    return {x, y, th};
}

std::vector<std::vector<ObstaclePose>> simulate_obstacle_traces(
    const Scenario& scenario, const ThetaSpec& theta, std::size_t horizon,
    double dt, const Box2& arena, RngStream& rng) {
    std::vector<std::vector<ObstaclePose>> traces(horizon + 1);
    traces[0] = scenario.moving_obstacles;
    for (std::size_t j = 1; j <= horizon; ++j) {
        traces[j].reserve(traces[j - 1].size());
        for (const auto& p : traces[j - 1])
            traces[j].push_back(moving_obstacle_step(
                p, theta.obstacle_speed, theta.heading_jitter, dt, arena, rng));
    }
    return traces;
}

ControllerConfig robotarium_controller() { return ControllerConfig{}; }

ControllerConfig quadruped_controller() {
    ControllerConfig c;
    c.capture_radius = 0.30;
    c.stop_distance = 0.45;
    c.hard_stop = 0.15;
    c.evade_radius = 0.40;
    c.evade_exit = 0.46;
    c.evade_reach = 0.80;
    c.align_gate = 1.0;  // omega saturates at 0.3 rad/s; turn before driving
    c.static_margin = 0.06;
    c.wall_margin = 0.0;  // walls are not obstacles on this platform
    c.moving_margin = 0.05;
    c.retreat_margin = 0.08;  // larger disturbances per step on this platform
    c.retreat_exit = 0.12;
    return c;
}

NavigationController::NavigationController(const Scenario& scenario,
                                           const GridGeometry& grid,
                                           const ControllerConfig& config,
                                           const PlatformProfile& profile)
    : scenario_(scenario),
      grid_(grid),
      cfg_(config),
      input_box_(profile.input_box),
      walls_(profile.walls_are_obstacles),
      path_(shortest_path(scenario)) {}

bool NavigationController::blocked_point(double x, double y,
                                         std::span<const ObstaclePose> moving) const {
    if (walls_ && (x < grid_.arena.x.lo + cfg_.wall_margin ||
                   x > grid_.arena.x.hi - cfg_.wall_margin ||
                   y < grid_.arena.y.lo + cfg_.wall_margin ||
                   y > grid_.arena.y.hi - cfg_.wall_margin))
        return true;
    for (const auto& c : scenario_.static_obstacles)
        if (grid_.cell_distance(c, x, y) <= cfg_.static_margin) return true;
    const double r = cfg_.collision_radius + cfg_.moving_margin;
    for (const auto& o : moving)
        if (std::hypot(o.x - x, o.y - y) <= r) return true;
    return false;
}

double NavigationController::free_distance(const ModelState& s,
                                           std::span<const ObstaclePose> moving) const {
    const int probes = 4;
    const double cx = std::cos(s.theta);
    const double cy = std::sin(s.theta);
    for (int i = 1; i <= probes; ++i) {
        const double t = cfg_.stop_distance * i / probes;
        if (blocked_point(s.x + t * cx, s.y + t * cy, moving))
            return cfg_.stop_distance * (i - 1) / probes;
    }
    return cfg_.stop_distance;
}

double NavigationController::clearance(double x, double y,
                                       std::span<const ObstaclePose> moving) const {
    double c = std::numeric_limits<double>::infinity();
    for (const auto& o : moving)
        c = std::min(c, std::hypot(o.x - x, o.y - y) - cfg_.collision_radius);
    for (const auto& cell : scenario_.static_obstacles)
        c = std::min(c, grid_.cell_distance(cell, x, y));
    if (walls_) {
        c = std::min({c, x - grid_.arena.x.lo, grid_.arena.x.hi - x,
                      y - grid_.arena.y.lo, grid_.arena.y.hi - y});
    }
    return c;
}

double NavigationController::hazard_away(const ModelState& s,
                                         std::span<const ObstaclePose> moving,
                                         double& away_x, double& away_y) const {
    // Gap to the nearest crash surface plus a push direction away from every
    // hazard inside the awareness band, weighted by how deep it intrudes. The
    // band is wider than the retreat trigger so the push already steers
    // around hazards the robot would otherwise sweep into sideways.
    const double band = 3.0 * cfg_.retreat_exit;
    double gap = std::numeric_limits<double>::infinity();
    away_x = 0.0;
    away_y = 0.0;
    const auto push = [&](double d, double nx, double ny) {
        gap = std::min(gap, d);
        if (d < band) {
            const double w = band - d;
            away_x += w * nx;
            away_y += w * ny;
        }
    };

    if (walls_) {
        push(s.x - grid_.arena.x.lo, 1.0, 0.0);
        push(grid_.arena.x.hi - s.x, -1.0, 0.0);
        push(s.y - grid_.arena.y.lo, 0.0, 1.0);
        push(grid_.arena.y.hi - s.y, 0.0, -1.0);
    }
    for (const auto& c : scenario_.static_obstacles) {
        const double d = grid_.cell_distance(c, s.x, s.y);
        if (d >= band) {
            gap = std::min(gap, d);
            continue;
        }
        const double half = 0.5 * grid_.cell_size;
        const double cx = grid_.center_x(c);
        const double cy = grid_.center_y(c);
        // Nearest point on the cell rectangle; fall back to the centre
        // direction if the pose is inside the rectangle.
        const double px = std::clamp(s.x, cx - half, cx + half);
        const double py = std::clamp(s.y, cy - half, cy + half);
        double nx = s.x - px;
        double ny = s.y - py;
        double len = std::hypot(nx, ny);
        if (len < 1e-12) {
            nx = s.x - cx;
            ny = s.y - cy;
            len = std::hypot(nx, ny);
            if (len < 1e-12) {
                nx = 1.0;
                ny = 0.0;
                len = 1.0;
            }
        }
        push(d, nx / len, ny / len);
    }
    for (const auto& o : moving) {
        const double dist = std::hypot(s.x - o.x, s.y - o.y);
        const double d = dist - cfg_.collision_radius;
        if (d >= band || dist < 1e-12) {
            gap = std::min(gap, d);
            continue;
        }
        push(d, (s.x - o.x) / dist, (s.y - o.y) / dist);
    }
    return gap;
}

double NavigationController::escape_bearing(const ModelState& s,
                                            std::span<const ObstaclePose> moving,
                                            double desired) const {
    // Candidate bearings fan out from the desired one; earlier entries win
    // ties, which biases toward staying on course.
    static constexpr double kOffsets[] = {
        0.0,    -0.5236, 0.5236, -1.0472, 1.0472, -1.5708,
        1.5708, -2.0944, 2.0944, -2.6180, 2.6180, 3.1416};
    const int probes = 4;
    double best = desired;
    double best_score = -std::numeric_limits<double>::infinity();
    for (const double off : kOffsets) {
        const double cand = desired + off;
        const double cx = std::cos(cand);
        const double cy = std::sin(cand);
        double score = std::numeric_limits<double>::infinity();
        for (int i = 1; i <= probes; ++i) {
            const double t = cfg_.evade_reach * i / probes;
            score = std::min(score, clearance(s.x + t * cx, s.y + t * cy, moving));
        }
        if (score > best_score + 1e-9) {
            best_score = score;
            best = cand;
        }
    }
    return best;
}

ModelInput NavigationController::step(const ModelState& s,
                                      std::span<const ObstaclePose> moving) {
    // Upper level: advance the waypoint when captured.
    while (!done_) {
        const Cell& c = path_[target_];
        if (std::hypot(grid_.center_x(c) - s.x, grid_.center_y(c) - s.y) <=
            cfg_.capture_radius) {
            if (++target_ >= path_.size()) done_ = true;
        } else {
            break;
        }
    }

    // Last-ditch layer: hugging a crash surface (typical right after spawning
    // against a wall or an obstacle cell edge). Back straight off it, driving
    // in reverse when that is the quicker way out, before any path tracking.
    double away_x = 0.0, away_y = 0.0;
    const double gap = hazard_away(s, moving, away_x, away_y);
    if (retreating_ ? gap < cfg_.retreat_exit : gap < cfg_.retreat_margin) {
        retreating_ = true;
        double away;
        if (std::abs(away_x) < 1e-12 && std::abs(away_y) < 1e-12)
            away = escape_bearing(s, moving, s.theta);  // cornered: probe instead
        else
            away = std::atan2(away_y, away_x);
        const double a = wrap_angle_pi(away - s.theta);
        // Near-bang-bang pushback: full speed once the heading has any useful
        // escape component (forward or reverse), linear only through the
        // broadside deadband. Turning gain is boosted so that deadband is
        // brief. Wins the drift race when spawned millimetres from a surface.
        const double thrust = std::clamp(std::cos(a) / 0.15, -1.0, 1.0);
        return {input_box_.v.clamp(input_box_.v.hi * thrust),
                input_box_.omega.clamp(4.0 * cfg_.k_alpha * a)};
    }
    retreating_ = false;

    if (done_) return {0.0, 0.0};

    const double tx = grid_.center_x(path_[target_]);
    const double ty = grid_.center_y(path_[target_]);
    double bearing = std::atan2(ty - s.y, tx - s.x);
    double drive = std::hypot(tx - s.x, ty - s.y);

    // Evasion: a nearby moving obstacle overrides path tracking until it is
    // clearly out of range again (hysteresis avoids mode chatter).
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& o : moving)
        nearest = std::min(nearest, std::hypot(o.x - s.x, o.y - s.y));
    if (nearest < (evading_ ? cfg_.evade_exit : cfg_.evade_radius)) {
        evading_ = true;
        bearing = escape_bearing(s, moving, bearing);
        drive = cfg_.evade_reach;
    } else {
        evading_ = false;
    }

    double alpha = wrap_angle_pi(bearing - s.theta);
    double v = 0.0;
    const double free = free_distance(s, moving);
    if (std::abs(alpha) <= cfg_.align_gate) {
        v = std::min(cfg_.k_rho * drive * std::cos(alpha), input_box_.v.hi);
        if (v < 0.0) v = 0.0;
        // Forward gate: taper toward zero approaching anything solid.
        if (free <= cfg_.hard_stop)
            v = 0.0;
        else if (free < cfg_.stop_distance)
            v *= (free - cfg_.hard_stop) / (cfg_.stop_distance - cfg_.hard_stop);
    }

    // Pinned against something with the path bearing blocked: rotate toward
    // the clearest direction instead of grinding into the blockage.
    if (!evading_ && v == 0.0 && std::abs(alpha) <= cfg_.align_gate &&
        free <= cfg_.hard_stop) {
        bearing = escape_bearing(s, moving, bearing);
        alpha = wrap_angle_pi(bearing - s.theta);
    }

    return {v, input_box_.omega.clamp(cfg_.k_alpha * alpha)};
}

SafetyTracker::SafetyTracker(const Scenario& scenario, const GridGeometry& grid,
                             const SafetyConfig& config, bool walls_are_obstacles)
    : scenario_(scenario),
      grid_(grid),
      cfg_(config),
      walls_(walls_are_obstacles),
      path_(shortest_path(scenario)) {
    if (scenario.grid_width != grid.width || scenario.grid_height != grid.height ||
        std::abs(scenario.cell_size - grid.cell_size) > 1e-12)
        throw std::invalid_argument("SafetyTracker: scenario/grid mismatch");
}

void SafetyTracker::feed(const ModelState& pose,
                         std::span<const ObstaclePose> moving) {
    if (moving.size() != scenario_.moving_obstacles.size())
        throw std::invalid_argument("SafetyTracker: obstacle trace width mismatch");
    const std::int64_t step = steps_fed_++;
    if (crashed_) return;

    bool crash = false;
    if (walls_ && (pose.x <= grid_.arena.x.lo || pose.x >= grid_.arena.x.hi ||
                   pose.y <= grid_.arena.y.lo || pose.y >= grid_.arena.y.hi))
        crash = true;
    if (!crash) {
        for (const auto& c : scenario_.static_obstacles) {
            if (grid_.cell_distance(c, pose.x, pose.y) <= cfg_.static_inflation) {
                crash = true;
                break;
            }
        }
    }
    if (!crash) {
        for (const auto& o : moving) {
            if (std::hypot(o.x - pose.x, o.y - pose.y) <= cfg_.collision_radius) {
                crash = true;
                break;
            }
        }
    }
    if (crash) {
        crashed_ = true;
        crash_step_ = step;
        return;
    }

    while (next_idx_ < path_.size() &&
           std::hypot(grid_.center_x(path_[next_idx_]) - pose.x,
                      grid_.center_y(path_[next_idx_]) - pose.y) <=
               cfg_.progress_capture)
        ++next_idx_;
}

SafetyValue SafetyTracker::result() const {
    SafetyValue v;
    v.crashed = crashed_;
    if (crashed_) {
        v.value = -1.0;
        v.steps_used = crash_step_;
    } else {
        v.value = scenario_.cell_size * static_cast<double>(next_idx_ - 1);
        v.reached_goal = next_idx_ == path_.size();
        v.steps_used = std::max<std::int64_t>(steps_fed_ - 1, 0);
    }
    return v;
}

SafetyValue safety_metric(std::span<const ModelState> poses,
                          const Scenario& scenario, const GridGeometry& grid,
                          const std::vector<std::vector<ObstaclePose>>& traces,
                          const SafetyConfig& config, bool walls_are_obstacles) {
    if (poses.empty()) throw std::invalid_argument("safety_metric: empty trajectory");
    const bool no_moving = scenario.moving_obstacles.empty();
    if (!no_moving && traces.size() != poses.size())
        throw std::invalid_argument("safety_metric: trace/trajectory length mismatch");

    SafetyTracker tracker(scenario, grid, config, walls_are_obstacles);
    const std::vector<ObstaclePose> none;
    for (std::size_t j = 0; j < poses.size(); ++j) {
        const auto& obs = no_moving && traces.empty() ? none : traces[j];
        tracker.feed(poses[j], obs);
    }
    return tracker.result();
}

SafetyValue sample_safety_value(const VerificationSetup& setup,
                                std::uint64_t seed, Scenario* scenario_out) {
    const auto& profile = setup.profile;
    const GridGeometry grid = make_grid(setup.theta, profile.state_box);
    RngStream rng(seed);

    Scenario sc = sample_scenario(setup.theta, grid, rng, seed);

    // Draw order is part of the reproducibility contract: scenario, then the
    // start pose (x, y, heading), then obstacle traces, then disturbances.
    const double cx = grid.arena.x.lo + sc.start_cell.col * grid.cell_size;
    const double cy = grid.arena.y.lo + sc.start_cell.row * grid.cell_size;
    const ModelState x0{rng.uniform(cx, cx + grid.cell_size),
                        rng.uniform(cy, cy + grid.cell_size),
                        rng.uniform(0.0, kTwoPi)};

    const auto traces = simulate_obstacle_traces(
        sc, setup.theta, static_cast<std::size_t>(setup.horizon),
        profile.dt_model, grid.arena, rng);

    NavigationController controller(sc, grid, setup.controller, profile);
    const auto law = [&](const ModelState& s, std::size_t j) {
        return controller.step(s, traces[j]);
    };
    const auto traj = rollout(x0, law, static_cast<std::size_t>(setup.horizon),
                              setup.set, profile, rng, seed);

    const SafetyValue sv = safety_metric(traj.states, sc, grid, traces,
                                         setup.safety, profile.walls_are_obstacles);
    if (scenario_out) *scenario_out = std::move(sc);
    return sv;
}

VerificationResult verify_controller(const VerificationSetup& setup,
                                     std::int64_t n, double epsilon,
                                     std::uint64_t master_seed, int workers) {
    if (n < 1) throw std::invalid_argument("verify_controller: n < 1");
    if (epsilon <= 0.0 || epsilon >= 1.0)
        throw std::invalid_argument("verify_controller: epsilon outside (0, 1)");
    setup.profile.validate();

    VerificationResult r;
    r.samples.resize(static_cast<std::size_t>(n));
    run_indexed(static_cast<std::size_t>(n), workers, [&](std::size_t i) {
        auto& sample = r.samples[i];
        sample.seed = derive_seed(master_seed, "verify", i);
        sample.safety = sample_safety_value(setup, sample.seed, &sample.scenario);
    });

    r.min_safety = std::numeric_limits<double>::infinity();
    for (const auto& s : r.samples) r.min_safety = std::min(r.min_safety, s.safety.value);
    r.certificate = make_certificate(n, epsilon, 1);
    r.controller_id = setup.controller_id;
    r.master_seed = master_seed;
    r.pass = r.min_safety >= 0.0;
    return r;
}

SafetyValidation validate_verification(const VerificationSetup& setup,
                                       double min_safety, double epsilon,
                                       std::size_t fresh_count,
                                       std::uint64_t master_seed, int workers,
                                       std::vector<double>* fresh_values) {
    if (fresh_count < 1)
        throw std::invalid_argument("validate_verification: no fresh samples");
    std::vector<double> values(fresh_count);
    run_indexed(fresh_count, workers, [&](std::size_t i) {
        values[i] = sample_safety_value(
                        setup, derive_seed(master_seed, "verify-fresh", i), nullptr)
                        .value;
    });
    if (fresh_values) *fresh_values = values;

    const EmpiricalDistribution dist(std::move(values), master_seed);
    SafetyValidation v;
    v.epsilon = epsilon;
    v.fresh_count = fresh_count;
    v.violation = empirical_violation(dist, min_safety, TailDirection::Below);
    v.cutoff = empirical_cutoff(dist, epsilon, TailSide::Lower);
    v.pass = v.violation <= epsilon;
    return v;
}

DeploymentReport deploy_test(const VerificationSetup& setup, std::int64_t runs,
                             std::int64_t max_ticks, std::uint64_t master_seed,
                             int workers) {
    if (runs < 1) throw std::invalid_argument("deploy_test: runs < 1");
    if (max_ticks < 1) throw std::invalid_argument("deploy_test: max_ticks < 1");
    const auto& profile = setup.profile;
    const GridGeometry grid = make_grid(setup.theta, profile.state_box);

    DeploymentReport report;
    report.max_ticks = max_ticks;
    report.runs.resize(static_cast<std::size_t>(runs));
    run_indexed(static_cast<std::size_t>(runs), workers, [&](std::size_t i) {
        DeploymentRun& run = report.runs[i];
        run.seed = derive_seed(master_seed, "deploy", i);
        RngStream rng(run.seed);

        Scenario sc = sample_scenario(setup.theta, grid, rng, run.seed);
        const double cx = grid.arena.x.lo + sc.start_cell.col * grid.cell_size;
        const double cy = grid.arena.y.lo + sc.start_cell.row * grid.cell_size;
        const ModelState x0{rng.uniform(cx, cx + grid.cell_size),
                            rng.uniform(cy, cy + grid.cell_size),
                            rng.uniform(0.0, kTwoPi)};

        NavigationController controller(sc, grid, setup.controller, profile);
        SafetyTracker tracker(sc, grid, setup.safety,
                              profile.walls_are_obstacles);
        std::vector<ObstaclePose> obstacles = sc.moving_obstacles;
        PlantState plant = embed_state(x0);

        run.trace.push_back(x0);
        tracker.feed(x0, obstacles);
        std::int64_t t = 0;
        // Per tick: command, plant advances K true steps, obstacles advance
        // one model step, then the safety bookkeeping sees the new snapshot.
        while (t < max_ticks && !tracker.crashed() && !controller.done()) {
            const ModelInput u = controller.step(project_state(plant), obstacles);
            plant = run_model_tick(plant, u, profile, rng);
            for (auto& o : obstacles)
                o = moving_obstacle_step(o, setup.theta.obstacle_speed,
                                         setup.theta.heading_jitter,
                                         profile.dt_model, grid.arena, rng);
            run.trace.push_back(project_state(plant));
            tracker.feed(run.trace.back(), obstacles);
            ++t;
        }

        const SafetyValue sv = tracker.result();
        run.crashed = sv.crashed;
        run.reached_goal = sv.reached_goal;
        run.success = sv.reached_goal && !sv.crashed;
        run.ticks_used = t;
        run.safety_value = sv.value;
        run.scenario = std::move(sc);
    });

    for (const auto& r : report.runs)
        if (r.success) ++report.successes;
    return report;
}

}  // namespace gapcert
