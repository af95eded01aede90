#include <doctest.h>

#include "support/oracles.hpp"
#include "swarmwall/geometry.hpp"

using namespace swarmwall;

TEST_SUITE_BEGIN("geometry");

TEST_CASE("hull of a triangle keeps all three vertices, counter-clockwise") {
    const ConvexPolygon hull = convex_hull({{0, 0}, {1, 0}, {0, 1}});
    REQUIRE(hull.vertices.size() == 3);
    double twice_area = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& a = hull.vertices[i];
        const auto& b = hull.vertices[(i + 1) % 3];
        twice_area += a.x * b.y - a.y * b.x;
    }
    CHECK(twice_area > 0); // CCW
}

TEST_CASE("interior points are excluded") {
    const ConvexPolygon hull = convex_hull({{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0.5, 0.5}});
    REQUIRE(hull.vertices.size() == 4);
    for (const auto& v : hull.vertices) CHECK((v.x == 0.0 || v.x == 1.0));
}

TEST_CASE("degenerate inputs give the empty polygon") {
    CHECK(convex_hull({}).empty());
    CHECK(convex_hull({{1, 2}}).empty());
    CHECK(convex_hull({{1, 2}, {3, 4}}).empty());
    // collinear run
    CHECK(convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}, {4, 4}}).empty());
    CHECK(polygon_area(convex_hull({{0, 0}, {1, 1}, {2, 2}})) == 0.0);
}

TEST_CASE("non-finite coordinates are rejected") {
    CHECK_THROWS_AS(convex_hull({{0, 0}, {1, 0}, {0, std::nan("")}}), InvalidInputError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(convex_hull({{inf, 0}, {1, 0}, {0, 1}}), InvalidInputError);
}

TEST_CASE("hull matches the brute-force triangle-containment oracle") {
    Rng rng(20240501);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform_index(62));
        std::vector<Point2> pts;
        for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(), rng.uniform()});
        const auto expected = oracles::brute_force_hull_vertices(pts);
        const ConvexPolygon hull = convex_hull(pts);
        if (hull.empty()) {
            CHECK(expected.size() < 3);
            continue;
        }
        CHECK(oracles::same_vertex_set(oracles::sorted_vertices(hull), expected));
    }
}

TEST_CASE("every input point lies inside or on its hull") {
    Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point2> pts;
        for (int i = 0; i < 40; ++i) pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
        const ConvexPolygon hull = convex_hull(pts);
        REQUIRE(!hull.empty());
        for (const auto& p : pts) CHECK(contains_point(hull, p, 1e-6));
    }
}

TEST_CASE("hull vertices are a subset of the input points") {
    Rng rng(31337);
    std::vector<Point2> pts;
    for (int i = 0; i < 50; ++i) pts.push_back({rng.uniform(), rng.uniform()});
    const ConvexPolygon hull = convex_hull(pts);
    for (const auto& v : hull.vertices) {
        bool found = false;
        for (const auto& p : pts) found = found || (p == v);
        CHECK(found);
    }
}

TEST_CASE("unit square area and empty-polygon area") {
    const ConvexPolygon square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    CHECK(polygon_area(square) == doctest::Approx(1.0));
    CHECK(polygon_area(ConvexPolygon{}) == 0.0);
}

TEST_CASE("area matches a stratified Monte Carlo estimate within 1%") {
    Rng rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const ConvexPolygon poly = oracles::random_convex_polygon(rng, 12);
        const double exact = polygon_area(poly);
        REQUIRE(exact > 0.01);
        double x0, x1, y0, y1;
        oracles::bounding_box(poly, x0, x1, y0, y1);
        const double mc = oracles::stratified_area(
            [&](const Point2& p) { return oracles::point_in_convex(poly, p); }, x0, x1, y0, y1,
            1000000, rng);
        CHECK(std::abs(mc - exact) / exact < 0.01);
    }
}

TEST_CASE("intersection of identical squares is the square") {
    const ConvexPolygon square{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    const ConvexPolygon inter = convex_intersection(square, square);
    CHECK(polygon_area(inter) == doctest::Approx(1.0));
}

TEST_CASE("disjoint squares do not intersect") {
    const ConvexPolygon a{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    const ConvexPolygon b{{{2, 2}, {3, 2}, {3, 3}, {2, 3}}};
    CHECK(convex_intersection(a, b).empty());
    CHECK(union_area(a, b) == doctest::Approx(2.0));
}

TEST_CASE("quarter-overlap squares: intersection 0.25, union 1.75") {
    const ConvexPolygon a{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
    const ConvexPolygon b{{{0.5, 0.5}, {1.5, 0.5}, {1.5, 1.5}, {0.5, 1.5}}};
    CHECK(polygon_area(convex_intersection(a, b)) == doctest::Approx(0.25));
    CHECK(union_area(a, b) == doctest::Approx(1.75));
    CHECK(union_area(a, a) == doctest::Approx(1.0));
}

TEST_CASE("intersection bounds and symmetry over random polygon pairs") {
    Rng rng(4242);
    for (int trial = 0; trial < 1000; ++trial) {
        const ConvexPolygon a = oracles::random_convex_polygon(rng, 8);
        const ConvexPolygon b = oracles::random_convex_polygon(rng, 8, 0.3, 1.3, 0.3, 1.3);
        const double ab = polygon_area(convex_intersection(a, b));
        const double ba = polygon_area(convex_intersection(b, a));
        CHECK(std::abs(ab - ba) <= 1e-9);
        CHECK(ab <= std::min(polygon_area(a), polygon_area(b)) + 1e-9);
        CHECK(union_area(a, b) <= polygon_area(a) + polygon_area(b) + 1e-9);
        // the clipped region sits inside both inputs
        const ConvexPolygon inter = convex_intersection(a, b);
        for (const auto& v : inter.vertices) {
            CHECK(contains_point(a, v, 1e-9));
            CHECK(contains_point(b, v, 1e-9));
        }
    }
}

TEST_SUITE_END();
