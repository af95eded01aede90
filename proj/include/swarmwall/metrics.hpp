#pragma once

// Coverage and mixing-ratio metrics over swarm positions.

#include <span>
#include <vector>

#include "swarmwall/geometry.hpp"

namespace swarmwall {

struct TickMetrics {
    long step = 0;
    double coverage_a = 0.0; // percent of arena
    double coverage_b = 0.0;
    double mixing = 0.0; // percent of hull union

    friend bool operator==(const TickMetrics&, const TickMetrics&) = default;
};

// Percent of the arena enclosed by the swarm's convex hull. Degenerate
// hulls (fewer than 3 non-collinear robots) cover 0.
inline double coverage(std::span<const Point2> positions, double arena_width, double arena_height) {
    const ConvexPolygon hull = convex_hull({positions.begin(), positions.end()});
    return 100.0 * polygon_area(hull) / (arena_width * arena_height);
}

// Intersection of the two swarms' hulls as a percent of their union.
// If either hull is degenerate the intersection is empty, so the ratio is 0;
// identical hulls give 100.
inline double mixing_ratio(std::span<const Point2> positions_a, std::span<const Point2> positions_b) {
    const ConvexPolygon hull_a = convex_hull({positions_a.begin(), positions_a.end()});
    const ConvexPolygon hull_b = convex_hull({positions_b.begin(), positions_b.end()});
    const double inter = polygon_area(convex_intersection(hull_a, hull_b));
    const double uni = polygon_area(hull_a) + polygon_area(hull_b) - inter;
    if (uni <= 0.0) return 0.0;
    return 100.0 * inter / uni;
}

} // namespace swarmwall
