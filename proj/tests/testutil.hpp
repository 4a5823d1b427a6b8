#pragma once

// Shared fixtures and small independent oracles for the test suites.

#include <catch2/catch_amalgamated.hpp>

#include "quermass/body.hpp"

#include <cmath>

namespace qmtest {

using namespace quermass;

inline Vec vec2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

inline Vec vec3(double x, double y, double z) {
    Vec v(3);
    v << x, y, z;
    return v;
}

inline Vec dir2(double theta) { return vec2(std::cos(theta), std::sin(theta)); }

// axis-aligned box [-1,1]^2
inline Polytope square() {
    Mat nm(2, 4);
    nm << 1, -1, 0, 0, 0, 0, 1, -1;
    return wulff_shape(nm, Vec::Ones(4)).poly;
}

// |x|+|y| <= 1
inline Polytope cross_polytope2() {
    Mat pts(2, 4);
    pts << 1, -1, 0, 0, 0, 0, 1, -1;
    return convex_hull(pts).poly;
}

// [-1,1]^3
inline Polytope cube() {
    Mat nm(3, 6);
    nm << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
    return wulff_shape(nm, Vec::Ones(6)).poly;
}

// |x|+|y|+|z| <= 1
inline Polytope octahedron() {
    Mat pts(3, 6);
    pts << 1, -1, 0, 0, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0, 0, 0, 1, -1;
    return convex_hull(pts).poly;
}

// Exact polytope volume via facet pyramids; the independent route for
// volume-type checks.
inline double exact_volume(const Polytope& P) { return polytope_volume(P); }

// Shoelace area from the vertex hull ordering (n=2), fully independent
// of support numbers.
inline double shoelace_area(const Polytope& P) {
    std::vector<std::pair<double, int>> order;
    for (int k = 0; k < P.vertex_count(); ++k)
        order.emplace_back(std::atan2(P.vertices(1, k), P.vertices(0, k)), k);
    std::sort(order.begin(), order.end());
    double acc = 0.0;
    for (size_t i = 0; i < order.size(); ++i) {
        const auto& a = P.vertices.col(order[i].second);
        const auto& b = P.vertices.col(order[(i + 1) % order.size()].second);
        acc += a(0) * b(1) - a(1) * b(0);
    }
    return 0.5 * std::abs(acc);
}

}  // namespace qmtest
