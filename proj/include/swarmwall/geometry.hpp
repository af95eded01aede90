#pragma once

// 2D computational geometry backing the coverage and mixing metrics:
// monotone-chain convex hulls, shoelace areas, and Sutherland-Hodgman
// clipping of convex polygons. Strict hulls: collinear runs are collapsed
// with tolerance kGeoEps.

#include <algorithm>
#include <cmath>
#include <vector>

#include "swarmwall/errors.hpp"

namespace swarmwall {

inline constexpr double kGeoEps = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline bool is_finite(const Point2& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

// Twice the signed area of triangle (a, b, c); > 0 for a counter-clockwise turn.
inline double cross(const Point2& a, const Point2& b, const Point2& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Vertices in counter-clockwise order; fewer than 3 vertices means degenerate
// (represented as the empty polygon).
struct ConvexPolygon {
    std::vector<Point2> vertices;

    bool empty() const { return vertices.size() < 3; }
};

// Monotone chain. Hull vertices are a subset of the input; collinear points
// on the boundary are excluded. Inputs with fewer than 3 non-collinear
// points yield the empty polygon.
inline ConvexPolygon convex_hull(std::vector<Point2> pts) {
    for (const auto& p : pts) {
        if (!is_finite(p)) throw InvalidInputError("convex_hull: non-finite coordinate");
    }
    std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return {};

    std::vector<Point2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) { // lower chain
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= kGeoEps) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) { // upper chain
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= kGeoEps) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1); // last point repeats the first
    if (hull.size() < 3) return {};
    return {std::move(hull)};
}

// Shoelace area; 0 for degenerate polygons.
inline double polygon_area(const ConvexPolygon& poly) {
    if (poly.empty()) return 0.0;
    double twice = 0.0;
    const auto& v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % n];
        twice += a.x * b.y - a.y * b.x;
    }
    return std::max(0.0, 0.5 * twice);
}

// True if p is inside or on the CCW polygon, with slack eps on the
// signed-area test.
inline bool contains_point(const ConvexPolygon& poly, const Point2& p, double eps = kGeoEps) {
    if (poly.empty()) return false;
    const auto& v = poly.vertices;
    for (std::size_t i = 0, n = v.size(); i < n; ++i) {
        if (cross(v[i], v[(i + 1) % n], p) < -eps) return false;
    }
    return true;
}

// Sutherland-Hodgman: clip polygon `a` against each half-plane of CCW
// polygon `b`. Exact for convex inputs; disjoint inputs give the empty
// polygon.
inline ConvexPolygon convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<Point2> out = a.vertices;
    const auto& clip = b.vertices;
    for (std::size_t e = 0, m = clip.size(); e < m && !out.empty(); ++e) {
        const Point2& p0 = clip[e];
        const Point2& p1 = clip[(e + 1) % m];
        std::vector<Point2> in;
        in.swap(out);
        out.reserve(in.size() + 1);
        for (std::size_t i = 0, n = in.size(); i < n; ++i) {
            const Point2& cur = in[i];
            const Point2& nxt = in[(i + 1) % n];
            const double dc = cross(p0, p1, cur);
            const double dn = cross(p0, p1, nxt);
            if (dc >= 0) out.push_back(cur);
            if ((dc > 0 && dn < 0) || (dc < 0 && dn > 0)) {
                const double t = dc / (dc - dn);
                out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
            }
        }
    }
    if (out.size() < 3) return {};
    return {std::move(out)};
}

// Inclusion-exclusion; exact for two convex polygons.
inline double union_area(const ConvexPolygon& a, const ConvexPolygon& b) {
    return polygon_area(a) + polygon_area(b) - polygon_area(convex_intersection(a, b));
}

} // namespace swarmwall
