#pragma once

// Initial-placement generators for the five scenario cases:
//   1: swarms at the left and right arena edges
//   2: swarm A in a band 1/8 of the width from the left edge, B at the right
//   3: both swarms uniform over the whole arena
//   4: concentric circles, B inner and A outer
//   5: both swarms in a small central box

#include <cmath>
#include <string>
#include <vector>

#include "swarmwall/config.hpp"
#include "swarmwall/geometry.hpp"
#include "swarmwall/rng.hpp"

namespace swarmwall {

struct Placement {
    std::vector<Point2> swarm_a;
    std::vector<Point2> swarm_b;
};

namespace detail {

struct Box {
    double x0, x1, y0, y1;
};

constexpr int kMaxRejectionSamples = 10000;

inline bool clear_of(const std::vector<Point2>& placed, const Point2& p, double min_dist) {
    const double md2 = min_dist * min_dist;
    for (const auto& q : placed) {
        const double dx = p.x - q.x, dy = p.y - q.y;
        if (dx * dx + dy * dy < md2) return false;
    }
    return true;
}

inline void fill_uniform(std::vector<Point2>& all, std::vector<Point2>& out, int count,
                         const Box& box, double min_dist, Rng& rng) {
    if (box.x1 < box.x0 || box.y1 < box.y0)
        throw ScenarioError("placement band is empty; arena too small for robot radius");
    for (int i = 0; i < count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxRejectionSamples; ++attempt) {
            const Point2 p{rng.uniform(box.x0, box.x1), rng.uniform(box.y0, box.y1)};
            if (clear_of(all, p, min_dist)) {
                all.push_back(p);
                out.push_back(p);
                placed = true;
                break;
            }
        }
        if (!placed)
            throw ScenarioError("infeasible placement: no room after " +
                                std::to_string(kMaxRejectionSamples) + " rejection samples");
    }
}

inline void fill_circle(std::vector<Point2>& all, std::vector<Point2>& out, int count,
                        double cx, double cy, double radius, double min_dist, const Box& bounds,
                        Rng& rng) {
    // Evenly spaced angles with a random phase; spacing must already clear
    // the collision distance since a phase shift cannot fix it.
    const double chord = 2.0 * radius * std::sin(kPi / count);
    if (count > 1 && chord < min_dist)
        throw ScenarioError("infeasible placement: circle too crowded");
    const double phase = rng.uniform(0.0, 2.0 * kPi);
    for (int i = 0; i < count; ++i) {
        const double ang = phase + 2.0 * kPi * i / count;
        const Point2 p{cx + radius * std::cos(ang), cy + radius * std::sin(ang)};
        if (p.x < bounds.x0 || p.x > bounds.x1 || p.y < bounds.y0 || p.y > bounds.y1)
            throw ScenarioError("infeasible placement: circle leaves the arena");
        if (!clear_of(all, p, min_dist)) throw ScenarioError("infeasible placement: circles collide");
        all.push_back(p);
        out.push_back(p);
    }
}

} // namespace detail

// Draws initial positions for both swarms (A first, then B; each robot in
// id order). Pairwise separation of at least 2 * robot_radius is enforced.
inline Placement place(const ScenarioSpec& scenario, const SimConfig& cfg, Rng& rng) {
    scenario.validate();
    cfg.validate();
    const double w = cfg.arena_width, h = cfg.arena_height, r = cfg.robot_radius;
    const double min_dist = 2.0 * r;
    const auto clamp_box = [&](detail::Box b) {
        b.x0 = std::max(b.x0, r);
        b.x1 = std::min(b.x1, w - r);
        b.y0 = std::max(b.y0, r);
        b.y1 = std::min(b.y1, h - r);
        return b;
    };

    Placement out;
    std::vector<Point2> all;
    all.reserve(static_cast<std::size_t>(scenario.n_a + scenario.n_b));

    switch (scenario.case_id) {
    case 1: {
        const double band = scenario.band_fraction * w;
        detail::fill_uniform(all, out.swarm_a, scenario.n_a, clamp_box({0, band, 0, h}), min_dist, rng);
        detail::fill_uniform(all, out.swarm_b, scenario.n_b, clamp_box({w - band, w, 0, h}), min_dist, rng);
        break;
    }
    case 2: {
        const double band = scenario.band_fraction * w;
        const double cx = scenario.offset_fraction * w;
        detail::fill_uniform(all, out.swarm_a, scenario.n_a,
                             clamp_box({cx - band / 2, cx + band / 2, 0, h}), min_dist, rng);
        detail::fill_uniform(all, out.swarm_b, scenario.n_b, clamp_box({w - band, w, 0, h}), min_dist, rng);
        break;
    }
    case 3: {
        const detail::Box whole = clamp_box({0, w, 0, h});
        detail::fill_uniform(all, out.swarm_a, scenario.n_a, whole, min_dist, rng);
        detail::fill_uniform(all, out.swarm_b, scenario.n_b, whole, min_dist, rng);
        break;
    }
    case 4: {
        // B on the inner circle, A on the outer one.
        const detail::Box arena = clamp_box({0, w, 0, h});
        detail::fill_circle(all, out.swarm_b, scenario.n_b, w / 2, h / 2, scenario.inner_radius * w,
                            min_dist, arena, rng);
        detail::fill_circle(all, out.swarm_a, scenario.n_a, w / 2, h / 2, scenario.outer_radius * w,
                            min_dist, arena, rng);
        break;
    }
    case 5: {
        const double side = scenario.center_box_fraction * std::min(w, h);
        const detail::Box box = clamp_box(
            {w / 2 - side / 2, w / 2 + side / 2, h / 2 - side / 2, h / 2 + side / 2});
        detail::fill_uniform(all, out.swarm_a, scenario.n_a, box, min_dist, rng);
        detail::fill_uniform(all, out.swarm_b, scenario.n_b, box, min_dist, rng);
        break;
    }
    default:
        throw ScenarioError("unknown case_id");
    }
    return out;
}

} // namespace swarmwall
