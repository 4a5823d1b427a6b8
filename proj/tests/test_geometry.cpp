#include "testutil.hpp"

#include "quermass/generator.hpp"

using namespace quermass;
using namespace qmtest;
using Catch::Approx;

TEST_CASE("support function on closed-form bodies") {
    auto ball = make_ball(1.0, 2);
    CHECK(support_eval(*ball, vec2(0.6, 0.8)) == Approx(1.0).margin(1e-14));

    Mat pts(2, 4);
    pts << 1, 1, -1, -1, 1, -1, 1, -1;
    auto sq = make_polytope_v(pts);
    CHECK(support_eval(*sq, vec2(1, 0)) == Approx(1.0).margin(1e-12));

    auto scaled = apply_linear(make_ball(1.0, 2), 2.0 * Mat::Identity(2, 2));
    CHECK(support_eval(*scaled, vec2(1, 0)) == Approx(2.0).margin(1e-12));

    auto uni = star_union(make_ball(1.0, 2), make_ball(2.0, 2));
    CHECK_THROWS_AS(support_eval(*uni, vec2(1, 0)), NonConvexBody);
}

TEST_CASE("radial function on the square and its polar") {
    auto sq = make_polytope(square());
    CHECK(radial_eval(*sq, dir2(0.0)) == Approx(1.0).margin(1e-14));
    CHECK(radial_eval(*sq, dir2(kPi / 4)) == Approx(std::sqrt(2.0)).margin(1e-13));

    auto ps = polar(sq);
    CHECK(radial_eval(*ps, dir2(kPi / 4)) == Approx(1.0 / std::sqrt(2.0)).margin(1e-13));

    CHECK_THROWS_AS(radial_eval(*sq, vec2(0, 0)), ZeroVector);
}

TEST_CASE("polar bodies") {
    auto b = polar(make_ball(2.0, 2));
    CHECK(radial_eval(*b, dir2(1.0)) == Approx(0.5).margin(1e-14));

    auto ps = polar(make_polytope(square()));
    for (double th : {0.1, 0.9, 2.0, -2.5}) {
        double expect = 1.0 / (std::abs(std::cos(th)) + std::abs(std::sin(th)));
        CHECK(radial_eval(*ps, dir2(th)) == Approx(expect).epsilon(1e-12));
    }

    auto ell = make_ellipsoid(vec2(1.0, 2.0));
    auto pp = polar(polar(ell));
    for (int k = 0; k < 64; ++k) {
        Vec u = dir2(2.0 * kPi * k / 64.0);
        CHECK(radial_eval(*pp, u) == Approx(radial_eval(*ell, u)).epsilon(1e-10));
    }
}

TEST_CASE("wulff shape construction and pruning") {
    Mat nm(2, 4);
    nm << 1, -1, 0, 0, 0, 0, 1, -1;
    WulffResult w = wulff_shape(nm, Vec::Ones(4));
    CHECK(w.poly.facet_count() == 4);
    CHECK(w.poly.vertex_count() == 4);
    CHECK(w.pruned.empty());
    CHECK(polytope_radial(w.poly, dir2(kPi / 4)) == Approx(std::sqrt(2.0)));

    // plane x.v <= 2 along the diagonal misses the corner at distance sqrt(2)
    Mat nm5(2, 5);
    nm5 << 1, -1, 0, 0, std::sqrt(0.5), 0, 0, 1, -1, std::sqrt(0.5);
    Vec h5(5);
    h5 << 1, 1, 1, 1, 2;
    WulffResult w5 = wulff_shape(nm5, h5);
    CHECK(w5.poly.facet_count() == 4);
    REQUIRE(w5.pruned.size() == 1);
    CHECK(w5.pruned[0] == 4);
    for (int i = 0; i < 4; ++i) CHECK(w5.poly.support(i) == Approx(1.0));

    Mat hemi(2, 2);
    hemi << 1, 0, 0, 1;
    CHECK_THROWS_AS(wulff_shape(hemi, Vec::Ones(2)), UnboundedWulffShape);
}

TEST_CASE("convex hull of radial data") {
    Mat dirs(2, 4);
    dirs << 1, -1, 0, 0, 0, 0, 1, -1;
    auto cross = convex_hull_of_radial(dirs, Vec::Ones(4));
    CHECK(radial_eval(*cross, dir2(0.0)) == Approx(1.0));
    CHECK(radial_eval(*cross, dir2(kPi / 4)) == Approx(1.0 / std::sqrt(2.0)));

    // hull of the square's corner directions at distance sqrt(2) is the square
    Mat corner(2, 4);
    corner << 1, -1, -1, 1, 1, 1, -1, -1;
    for (int k = 0; k < 4; ++k) corner.col(k) /= corner.col(k).norm();
    auto sq = convex_hull_of_radial(corner, Vec::Constant(4, std::sqrt(2.0)));
    CHECK(radial_eval(*sq, dir2(0.0)) == Approx(1.0).epsilon(1e-12));
    CHECK(support_eval(*sq, dir2(kPi / 2)) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Lemma 4.1 duality between Wulff shapes and hulls") {
    // wulff(Omega, h)* and hull(Omega, 1/h) agree in radial evaluation
    Mat nm(2, 4);
    nm << 1, -1, 0, 0, 0, 0, 1, -1;
    auto lhs = polar(make_polytope(wulff_shape(nm, Vec::Ones(4)).poly));
    auto rhs = convex_hull_of_radial(nm, Vec::Ones(4));
    for (int k = 0; k < 64; ++k) {
        Vec u = dir2(2.0 * kPi * k / 64.0 + 0.013);
        CHECK(radial_eval(*lhs, u) == Approx(radial_eval(*rhs, u)).epsilon(1e-12));
    }

    for (int n : {2, 3}) {
        BodyGenerator gen(91 + n, n);
        for (int trial = 0; trial < 8; ++trial) {
            int m = gen.uniform_int(n + 1, 30);
            Mat dirs(n, m);
            Vec h(m);
            bool ok = false;
            while (!ok) {
                for (int i = 0; i < m; ++i) {
                    dirs.col(i) = gen.random_unit();
                    h(i) = gen.uniform(0.4, 2.5);
                }
                ok = hemisphere_margin(dirs) > 0.2;
            }
            auto lhs2 = polar(make_polytope(wulff_shape(dirs, h).poly));
            auto rhs2 = convex_hull_of_radial(dirs, h.cwiseInverse());
            for (int k = 0; k < 256; ++k) {
                Vec u = gen.random_unit();
                REQUIRE(radial_eval(*lhs2, u) == Approx(radial_eval(*rhs2, u)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("Lp Minkowski combinations") {
    auto sq = make_polytope(square());
    for (double p : {1.0, 2.0, -1.5}) {
        double t = 0.7;
        auto comb = lp_combination(sq, sq, 1.0, t, p);
        const Polytope* P = as_polytope(comb);
        REQUIRE(P != nullptr);
        double expect = std::pow(1.0 + t, 1.0 / p);
        for (int i = 0; i < P->facet_count(); ++i) CHECK(P->support(i) == Approx(expect));
    }

    auto b = make_ball(1.0, 2);
    auto comb = lp_combination(b, b, 1.0, 1.0, 2.0);
    CHECK(radial_eval(*comb, dir2(0.3)) == Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto disk = make_ball(1.0, 2);
    auto same = lp_combination(sq, disk, 1.0, 0.0, 3.0);
    const Polytope* S = as_polytope(same);
    REQUIRE(S != nullptr);
    for (int i = 0; i < S->facet_count(); ++i) CHECK(S->support(i) == Approx(1.0));

    CHECK_THROWS_AS(lp_combination(sq, sq, 1.0, -2.0, 1.0), NonPositiveCombination);
}

TEST_CASE("radial Gauss map on the square") {
    Polytope sq = square();
    int ie1 = -1, ie2 = -1;
    for (int i = 0; i < 4; ++i) {
        if (sq.normals(0, i) > 0.9) ie1 = i;
        if (sq.normals(1, i) > 0.9) ie2 = i;
    }
    CHECK(radial_gauss(sq, dir2(10.0 * kPi / 180.0)) == ie1);
    CHECK(radial_gauss(sq, dir2(100.0 * kPi / 180.0)) == ie2);
    CHECK(radial_gauss(sq, dir2(kPi / 4)) == std::min(ie1, ie2));

    // consistency: the chosen facet is tight, the others are not closer
    BodyGenerator gen(7, 2);
    Polytope P = gen.random_polytope(3, 12);
    for (int k = 0; k < 200; ++k) {
        Vec u = gen.random_unit();
        int i = radial_gauss(P, u);
        double rho = polytope_radial(P, u);
        REQUIRE(rho * u.dot(P.normals.col(i)) == Approx(P.support(i)).margin(1e-12));
        for (int f = 0; f < P.facet_count(); ++f) {
            if (u.dot(P.normals.col(f)) > 0)
                REQUIRE(rho * u.dot(P.normals.col(f)) <= P.support(f) + 1e-12);
        }
    }
}

TEST_CASE("linear images") {
    Vec d(2);
    d << 2, 3;
    auto img = apply_linear(make_ball(1.0, 2), Mat(d.asDiagonal()));
    auto ell = make_ellipsoid(d);
    for (int k = 0; k < 64; ++k) {
        Vec u = dir2(2.0 * kPi * k / 64.0);
        CHECK(radial_eval(*img, u) == Approx(radial_eval(*ell, u)).epsilon(1e-10));
    }

    auto sq = make_polytope(square());
    auto same = apply_linear(sq, Mat::Identity(2, 2));
    for (int k = 0; k < 16; ++k) {
        Vec u = dir2(0.4 * k);
        CHECK(radial_eval(*same, u) == Approx(radial_eval(*sq, u)).epsilon(1e-13));
    }

    Mat sing = Mat::Zero(2, 2);
    sing(0, 0) = 1.0;
    CHECK_THROWS_AS(apply_linear(sq, sing), SingularMatrix);
}

TEST_CASE("gauge norm") {
    auto b1 = make_ball(1.0, 2);
    CHECK(norm_gauge(*b1, vec2(3, 4)) == Approx(5.0));
    auto b2 = make_ball(2.0, 2);
    CHECK(norm_gauge(*b2, vec2(4, 0)) == Approx(2.0));
    CHECK(norm_gauge(*b2, vec2(0, 0)) == 0.0);
}

TEST_CASE("homogeneity of radial and support evaluation") {
    BodyGenerator gen(21, 2);
    auto bodies = {make_polytope(gen.random_polytope(3, 10)), gen.random_ellipsoid(),
                   make_ball(1.7, 2)};
    for (const auto& body : bodies) {
        for (int k = 0; k < 40; ++k) {
            Vec u = gen.random_unit();
            double lam = gen.uniform(0.1, 8.0);
            REQUIRE(radial_eval(*body, lam * u) ==
                    Approx(radial_eval(*body, u) / lam).epsilon(1e-12));
            REQUIRE(support_eval(*body, lam * u) ==
                    Approx(lam * support_eval(*body, u)).epsilon(1e-12));
        }
    }
}

TEST_CASE("polar duality and involution at random directions") {
    for (int n : {2, 3}) {
        BodyGenerator gen(300 + n, n);
        auto P = make_polytope(gen.random_polytope(n + 1, 14));
        auto Pp = polar(P);
        auto Ppp = polar(Pp);
        for (int k = 0; k < 256; ++k) {
            Vec u = gen.random_unit();
            REQUIRE(radial_eval(*Pp, u) * support_eval(*P, u) == Approx(1.0).epsilon(1e-10));
            REQUIRE(radial_eval(*Ppp, u) == Approx(radial_eval(*P, u)).epsilon(1e-10));
        }
    }
}

TEST_CASE("polar vertex dual to the selected facet") {
    // the support of P* at u is attained at the vertex v_i/h_i, where i
    // is the facet selected by the radial Gauss map of P
    for (const Polytope& P : {square(), cross_polytope2()}) {
        auto Pp = polar_polytope(P);
        for (int k = 0; k < 64; ++k) {
            Vec u = dir2(0.05 + 2.0 * kPi * k / 64.0);
            int i = radial_gauss(P, u);
            double attained = u.dot(P.normals.col(i)) / P.support(i);
            REQUIRE(polytope_support(Pp, u) == Approx(attained).epsilon(1e-12));
        }
    }
}

TEST_CASE("GL equivariance of Lp combination") {
    BodyGenerator gen(55, 2);
    auto M = make_polytope(gen.random_polytope(3, 9));
    auto N = make_polytope(gen.random_polytope(3, 9));
    Mat phi(2, 2);
    phi << 1.3, 0.4, -0.2, 0.9;
    for (double p : {1.0, 2.0}) {
        auto lhs = apply_linear(lp_combination(M, N, 1.0, 0.6, p), phi);
        auto rhs = lp_combination(apply_linear(M, phi), apply_linear(N, phi), 1.0, 0.6, p);
        const Polytope* R = as_polytope(rhs);
        REQUIRE(R != nullptr);
        for (int i = 0; i < R->facet_count(); ++i) {
            Vec v = R->normals.col(i);
            REQUIRE(support_eval(*lhs, v) == Approx(support_eval(*rhs, v)).epsilon(1e-9));
        }
    }
}

TEST_CASE("slab body evaluation") {
    auto slab = make_slab(0.5, 2);  // [-0.5,0.5] x [-1,1]
    CHECK(radial_eval(*slab, dir2(0.0)) == Approx(0.5));
    CHECK(radial_eval(*slab, dir2(kPi / 2)) == Approx(1.0));
    CHECK(support_eval(*slab, vec2(1, 1)) == Approx(1.5));
    auto g = gauss_map(*slab, dir2(0.01));
    REQUIRE(g.has_value());
    CHECK((*g)(0) == Approx(1.0));
}

TEST_CASE("hemisphere margin certificates") {
    Mat sq(2, 4);
    sq << 1, -1, 0, 0, 0, 0, 1, -1;
    CHECK(hemisphere_margin(sq) == Approx(std::sqrt(0.5)).epsilon(1e-9));

    Mat open_hemi(2, 3);
    open_hemi << 1, 0.9701425, 0.9701425, 0, 0.2425356, -0.2425356;
    CHECK(hemisphere_margin(open_hemi) < 0.0);

    // great-circle set in n=3: closed hemisphere, zero margin
    Mat ring(3, 4);
    ring << 1, -1, 0, 0, 0, 0, 1, -1, 0, 0, 0, 0;
    CHECK(hemisphere_margin(ring) <= 1e-9);
}
