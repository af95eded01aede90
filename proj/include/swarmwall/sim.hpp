#pragma once

// Deterministic discrete-time world: unicycle kinematics, boundary
// handling, 7-nearest-neighbor noisy sensing over a uniform grid index,
// encounter symbols, and a controller-independent collision-resolution
// pass. One tick = sense -> decide -> move (per robot, ascending id, all
// decisions reading the tick-start snapshot), then safety resolution,
// then metrics.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "swarmwall/config.hpp"
#include "swarmwall/fsm.hpp"
#include "swarmwall/geometry.hpp"
#include "swarmwall/metrics.hpp"
#include "swarmwall/rng.hpp"
#include "swarmwall/scenario.hpp"

namespace swarmwall {

inline constexpr int kNeighborSlots = 7;

enum class Swarm : std::uint8_t { A = 0, B = 1 };

inline char to_char(Swarm s) { return s == Swarm::A ? 'A' : 'B'; }

// One sensed neighbor. Distance and angle-of-arrival carry additive noise;
// swarm_type is relative (1 = nestmate). Padded slots have distance d_max,
// aoa 0, swarm_type 0, valid 0.
struct NeighborObservation {
    double distance = 0.0; // noisy range, clamped at 0
    double aoa = 0.0;      // noisy bearing in the body frame, [-pi, pi)
    bool same_swarm = false;
    bool valid = false;
    // Ground-truth bookkeeping (not part of the sensor payload).
    int neighbor_id = -1;
    double true_distance = 0.0;
    bool neighbor_moving = false; // neighbor was in the Moving FSM state at tick start
};

// Fixed-size sensor frame: the 7 nearest neighbors in range, sorted by
// ascending true distance, valid entries first.
struct ObservationFrame {
    std::array<NeighborObservation, kNeighborSlots> neighbors{};

    int valid_count() const {
        int n = 0;
        for (const auto& e : neighbors) n += e.valid ? 1 : 0;
        return n;
    }
};

// Per-robot state for the learned controller: Standstill latching.
struct RlControllerState {
    int latch_remaining = 0;
    int last_action = -1;

    friend bool operator==(const RlControllerState&, const RlControllerState&) = default;
};

struct RobotState {
    int id = 0;
    Swarm swarm = Swarm::A;
    Point2 position{};
    double heading = 0.0;          // [-pi, pi)
    double commanded_speed = 0.0;  // last command, units/tick
    ControllerFsmState fsm{};
    RlControllerState rl{};
};

// Uniform bucket grid over robot positions for range queries.
class SpatialGrid {
public:
    SpatialGrid(const std::vector<RobotState>& robots, double arena_w, double arena_h, double cell) {
        cell_ = std::max(cell, 1e-9);
        nx_ = std::max(1, static_cast<int>(std::ceil(arena_w / cell_)));
        ny_ = std::max(1, static_cast<int>(std::ceil(arena_h / cell_)));
        cells_.resize(static_cast<std::size_t>(nx_) * ny_);
        for (const auto& r : robots) cells_[cell_index(r.position)].push_back(r.id);
    }

    // Visits ids in the 3x3 cell block around p, in ascending cell/insert
    // order (deterministic).
    template <typename Fn>
    void for_candidates(const Point2& p, Fn&& fn) const {
        const int cx = clamp_x(static_cast<int>(p.x / cell_));
        const int cy = clamp_y(static_cast<int>(p.y / cell_));
        for (int y = std::max(0, cy - 1); y <= std::min(ny_ - 1, cy + 1); ++y)
            for (int x = std::max(0, cx - 1); x <= std::min(nx_ - 1, cx + 1); ++x)
                for (int id : cells_[static_cast<std::size_t>(y) * nx_ + x]) fn(id);
    }

private:
    int clamp_x(int x) const { return std::clamp(x, 0, nx_ - 1); }
    int clamp_y(int y) const { return std::clamp(y, 0, ny_ - 1); }
    std::size_t cell_index(const Point2& p) const {
        return static_cast<std::size_t>(clamp_y(static_cast<int>(p.y / cell_))) * nx_ +
               clamp_x(static_cast<int>(p.x / cell_));
    }

    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> cells_;
};

struct WorldState {
    SimConfig config{};
    long step = 0;
    std::vector<RobotState> robots; // index == id
    Rng rng;

    const RobotState& robot(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= robots.size())
            throw LookupError("unknown robot id " + std::to_string(id));
        return robots[static_cast<std::size_t>(id)];
    }

    std::vector<Point2> positions_of(Swarm s) const {
        std::vector<Point2> out;
        for (const auto& r : robots)
            if (r.swarm == s) out.push_back(r.position);
        return out;
    }
};

// Places robots per the scenario rule (swarm A gets ids 0..n_a-1), then
// draws headings uniformly in [-pi, pi) in id order. The RNG stream
// position afterwards is a pure function of the seed.
inline WorldState init_world(const ScenarioSpec& scenario, const SimConfig& cfg,
                             int walling_timer_ticks = 0) {
    WorldState w;
    w.config = cfg;
    w.rng = Rng(cfg.seed);
    const Placement placed = place(scenario, cfg, w.rng);

    auto add = [&](const std::vector<Point2>& pts, Swarm s) {
        for (const auto& p : pts) {
            RobotState r;
            r.id = static_cast<int>(w.robots.size());
            r.swarm = s;
            r.position = p;
            r.fsm.walling_timer_duration = walling_timer_ticks;
            w.robots.push_back(r);
        }
    };
    add(placed.swarm_a, Swarm::A);
    add(placed.swarm_b, Swarm::B);
    for (auto& r : w.robots) r.heading = w.rng.uniform(-kPi, kPi);
    return w;
}

namespace detail {

// 7-nearest-neighbor selection by true distance (ties broken by lower id)
// with additive sensing noise. Noise is always drawn for selected
// neighbors, so the stream layout does not depend on sigma values.
inline ObservationFrame sense_impl(const std::vector<RobotState>& robots, const SpatialGrid& grid,
                                   const SimConfig& cfg, int robot_id, Rng& rng) {
    const RobotState& self = robots[static_cast<std::size_t>(robot_id)];
    std::vector<std::pair<double, int>> in_range; // (true distance, id)
    grid.for_candidates(self.position, [&](int id) {
        if (id == robot_id) return;
        const auto& other = robots[static_cast<std::size_t>(id)];
        const double dx = other.position.x - self.position.x;
        const double dy = other.position.y - self.position.y;
        const double d = std::hypot(dx, dy);
        if (d <= cfg.sensing_range) in_range.emplace_back(d, id);
    });
    const std::size_t keep = std::min<std::size_t>(kNeighborSlots, in_range.size());
    std::partial_sort(in_range.begin(), in_range.begin() + static_cast<std::ptrdiff_t>(keep),
                      in_range.end());
    ObservationFrame frame;
    for (std::size_t k = 0; k < keep; ++k) {
        const auto [d, id] = in_range[k];
        const auto& other = robots[static_cast<std::size_t>(id)];
        NeighborObservation& obs = frame.neighbors[k];
        const double bearing =
            wrap_angle(std::atan2(other.position.y - self.position.y,
                                  other.position.x - self.position.x) - self.heading);
        obs.distance = std::max(0.0, d + rng.normal(0.0, cfg.noise_sigma_d));
        obs.aoa = wrap_angle(bearing + rng.normal(0.0, cfg.noise_sigma_theta));
        obs.same_swarm = other.swarm == self.swarm;
        obs.valid = true;
        obs.neighbor_id = id;
        obs.true_distance = d;
        obs.neighbor_moving = other.fsm.state == FsmState::Moving;
    }
    for (std::size_t k = keep; k < kNeighborSlots; ++k) {
        frame.neighbors[k].distance = cfg.sensing_range;
        frame.neighbors[k].true_distance = cfg.sensing_range;
    }
    return frame;
}

// First valid frame entry of the wanted kind; frames are sorted by true
// distance, so this is the nearest.
inline const NeighborObservation* nearest_of(const ObservationFrame& frame, bool same_swarm) {
    for (const auto& e : frame.neighbors)
        if (e.valid && e.same_swarm == same_swarm) return &e;
    return nullptr;
}

} // namespace detail

// One-off sensing of a single robot from the current world state.
inline ObservationFrame sense(WorldState& w, int robot_id) {
    w.robot(robot_id); // id check
    const SpatialGrid grid(w.robots, w.config.arena_width, w.config.arena_height,
                           w.config.sensing_range);
    return detail::sense_impl(w.robots, grid, w.config, robot_id, w.rng);
}

// Senses every robot in id order (the frame layout a tick would produce).
inline std::vector<ObservationFrame> sense_all(WorldState& w) {
    const SpatialGrid grid(w.robots, w.config.arena_width, w.config.arena_height,
                           w.config.sensing_range);
    std::vector<ObservationFrame> frames;
    frames.reserve(w.robots.size());
    for (const auto& r : w.robots)
        frames.push_back(detail::sense_impl(w.robots, grid, w.config, r.id, w.rng));
    return frames;
}

// Encounter symbols for one robot, evaluated on its (noisy) sensor frame.
inline SymbolSet detect_events(const SimConfig& cfg, const ObservationFrame& frame,
                               const ControllerFsmState& fsm) {
    double nearest_mate = std::numeric_limits<double>::infinity();
    double nearest_other = std::numeric_limits<double>::infinity();
    bool moving_mate_near = false;
    for (const auto& e : frame.neighbors) {
        if (!e.valid) continue;
        if (e.same_swarm) {
            nearest_mate = std::min(nearest_mate, e.distance);
            if (e.neighbor_moving && e.distance < cfg.encounter_radius) moving_mate_near = true;
        } else {
            nearest_other = std::min(nearest_other, e.distance);
        }
    }
    SymbolSet s = 0;
    if (nearest_mate < cfg.encounter_radius) s |= kNestmateEncounter;
    if (nearest_other < cfg.encounter_radius) s |= kNonNestmateEncounter;
    if (moving_mate_near) s |= kMovingNestmateEncounter;
    s |= (nearest_other < cfg.safe_dist) ? kBelowSafeDist : kAboveSafeDist;
    if (fsm.state == FsmState::Walling && fsm.walling_timer_remaining == 0)
        s |= kWallingTimerExpired;
    return s;
}

struct MotionCommand {
    double speed = 0.0;         // units/tick
    double heading_delta = 0.0; // applied before the forward step
};

// Turns, then advances. A step that would leave the arena (inset by the
// robot radius) clamps to the boundary and re-aims the heading toward the
// arena center plus CRW noise.
inline void apply_motion(RobotState& r, const MotionCommand& cmd, const SimConfig& cfg, Rng& rng) {
    r.heading = wrap_angle(r.heading + cmd.heading_delta);
    r.commanded_speed = cmd.speed;
    if (cmd.speed == 0.0) return;
    double nx = r.position.x + cmd.speed * std::cos(r.heading);
    double ny = r.position.y + cmd.speed * std::sin(r.heading);
    const double lo_x = cfg.robot_radius, hi_x = cfg.arena_width - cfg.robot_radius;
    const double lo_y = cfg.robot_radius, hi_y = cfg.arena_height - cfg.robot_radius;
    if (nx < lo_x || nx > hi_x || ny < lo_y || ny > hi_y) {
        nx = std::clamp(nx, lo_x, hi_x);
        ny = std::clamp(ny, lo_y, hi_y);
        const double to_center = std::atan2(cfg.arena_height / 2 - ny, cfg.arena_width / 2 - nx);
        r.heading = wrap_angle(to_center + rng.normal(0.0, cfg.crw_sigma));
    }
    r.position = {nx, ny};
}

// Correlated random walk: heading noise then a full-speed forward step.
inline void crw_step(RobotState& r, const SimConfig& cfg, Rng& rng) {
    apply_motion(r, {cfg.speed, rng.normal(0.0, cfg.crw_sigma)}, cfg, rng);
}

// Pushes every overlapping pair apart along the line of centers until the
// gap reaches 2 * robot_radius, re-clamping to the arena; at most 8 sweeps.
inline void safety_resolve(std::vector<RobotState>& robots, const SimConfig& cfg) {
    const double min_dist = 2.0 * cfg.robot_radius;
    const double lo_x = cfg.robot_radius, hi_x = cfg.arena_width - cfg.robot_radius;
    const double lo_y = cfg.robot_radius, hi_y = cfg.arena_height - cfg.robot_radius;
    for (int sweep = 0; sweep < 8; ++sweep) {
        const SpatialGrid grid(robots, cfg.arena_width, cfg.arena_height,
                               std::max(4.0 * cfg.robot_radius, 1.0));
        bool any = false;
        for (auto& a : robots) {
            grid.for_candidates(a.position, [&](int jid) {
                if (jid <= a.id) return;
                auto& b = robots[static_cast<std::size_t>(jid)];
                const double dx = b.position.x - a.position.x;
                const double dy = b.position.y - a.position.y;
                const double d = std::hypot(dx, dy);
                if (d >= min_dist) return;
                any = true;
                double ux, uy;
                if (d > 1e-12) {
                    ux = dx / d;
                    uy = dy / d;
                } else {
                    // Coincident centers: deterministic direction from the pair ids.
                    const double ang = wrap_angle(2.39996322972865332 *
                                                  static_cast<double>(a.id * 73856093 + jid));
                    ux = std::cos(ang);
                    uy = std::sin(ang);
                }
                const double push = 0.5 * (min_dist - d) * (1.0 + 1e-9);
                a.position.x = std::clamp(a.position.x - push * ux, lo_x, hi_x);
                a.position.y = std::clamp(a.position.y - push * uy, lo_y, hi_y);
                b.position.x = std::clamp(b.position.x + push * ux, lo_x, hi_x);
                b.position.y = std::clamp(b.position.y + push * uy, lo_y, hi_y);
            });
        }
        if (!any) break;
    }
}

// Decides one robot's motion for this tick. Implementations may mutate the
// robot's controller-internal state and draw from the world RNG.
class Controller {
public:
    virtual ~Controller() = default;
    virtual MotionCommand decide(const SimConfig& cfg, RobotState& self,
                                 const ObservationFrame& frame, Rng& rng) = 0;
    // Label for position snapshots.
    virtual std::string state_label(const RobotState& self) const = 0;
};

inline TickMetrics compute_metrics(const WorldState& w) {
    TickMetrics m;
    m.step = w.step;
    const auto pos_a = w.positions_of(Swarm::A);
    const auto pos_b = w.positions_of(Swarm::B);
    m.coverage_a = coverage(pos_a, w.config.arena_width, w.config.arena_height);
    m.coverage_b = coverage(pos_b, w.config.arena_width, w.config.arena_height);
    m.mixing = mixing_ratio(pos_a, pos_b);
    return m;
}

// Advances the world by one tick: every robot senses the tick-start
// snapshot and acts in ascending id order, then overlaps are resolved and
// metrics taken.
inline TickMetrics tick(WorldState& w, Controller& controller) {
    const std::vector<RobotState> pre = w.robots;
    const SpatialGrid grid(pre, w.config.arena_width, w.config.arena_height,
                           w.config.sensing_range);
    for (auto& r : w.robots) {
        const ObservationFrame frame = detail::sense_impl(pre, grid, w.config, r.id, w.rng);
        const MotionCommand cmd = controller.decide(w.config, r, frame, w.rng);
        apply_motion(r, cmd, w.config, w.rng);
    }
    safety_resolve(w.robots, w.config);
    w.step += 1;
    return compute_metrics(w);
}

} // namespace swarmwall
