#include "testutil.hpp"

#include "quermass/curvature.hpp"
#include "quermass/generator.hpp"
#include "quermass/quermass.hpp"

using namespace quermass;
using namespace qmtest;
using Catch::Approx;

namespace {
const auto kOne = [](const Vec&) { return 1.0; };
}

TEST_CASE("square atoms: the secant-squared fixture") {
    Polytope sq = square();
    auto ball = make_ball(1.0, 2);
    auto grid = cone_partitioned_grid(sq, 32);

    // each cone integral is int_{-pi/4}^{pi/4} sec^2 = 2, atom = (1/2)*1*2 = 1
    auto mu0 = curvature_measure_polytope(sq, {0.0, 2.0, 0.0, ball}, grid);
    REQUIRE(mu0.atom_count() == 4);
    for (int i = 0; i < 4; ++i) CHECK(mu0.masses(i) == Approx(1.0).epsilon(1e-12));

    // h = 1 on every facet, so the p-weight is trivial
    auto mu1 = curvature_measure_polytope(sq, {1.0, 2.0, 0.0, ball}, grid);
    for (int i = 0; i < 4; ++i) CHECK(mu1.masses(i) == Approx(1.0).epsilon(1e-12));

    // scaling by lambda multiplies atoms by lambda^{q-p}
    for (double lam : {0.5, 2.0, 3.7}) {
        Polytope scaled = scale_polytope(sq, lam);
        auto gs = cone_partitioned_grid(scaled, 32);
        auto mus = curvature_measure_polytope(scaled, {1.0, 2.0, 0.0, ball}, gs);
        for (int i = 0; i < 4; ++i) CHECK(mus.masses(i) == Approx(lam).epsilon(1e-12));
    }
}

TEST_CASE("cube atoms give the facet pyramid volumes") {
    Polytope cb = cube();
    auto ball = make_ball(1.0, 3);
    auto grid = cone_partitioned_grid(cb, 32);
    auto mu = curvature_measure_polytope(cb, {0.0, 3.0, 0.0, ball}, grid);
    REQUIRE(mu.atom_count() == 6);
    for (int i = 0; i < 6; ++i) CHECK(mu.masses(i) == Approx(4.0 / 3.0).epsilon(1e-6));
    CHECK(mu.total() == Approx(8.0).epsilon(1e-6));
}

TEST_CASE("curvature functional against atoms and the quermass module") {
    Polytope sq = square();
    auto ball = make_ball(1.0, 2);
    auto grid = cone_partitioned_grid(sq, 32);
    MeasureParams prm{0.0, 2.0, 0.0, ball};

    CHECK(curvature_functional(sq, prm, kOne, grid) == Approx(4.0).epsilon(1e-12));

    auto indicator_e1 = [&](const Vec& v) { return v(0) > 0.9 ? 1.0 : 0.0; };
    CHECK(curvature_functional(sq, prm, indicator_e1, grid) == Approx(1.0).epsilon(1e-12));

    // g = h_N^p reproduces the mixed quermassintegral
    BodyGenerator gen(17, 2);
    auto M = make_polytope(gen.random_polytope(3, 10));
    auto N = make_polytope(gen.random_polytope(3, 10));
    auto Q = gen.random_ellipsoid();
    double p = 1.7, q = 2.4, j = 1.0;
    const Polytope* PM = as_polytope(*M);
    auto g2 = cone_partitioned_grid(*PM, 32);
    MeasureParams prm2{p, q, j, Q};
    double via_functional = curvature_functional(
        *PM, prm2, [&](const Vec& v) { return std::pow(support_eval(*N, v), p); }, g2);
    GridConfig cfg;
    cfg.estimate = false;
    double via_quermass = pq_mixed_quermass(M, N, Q, p, q, j, cfg).value;
    CHECK(via_functional == Approx(via_quermass).epsilon(1e-11));
}

TEST_CASE("boundary oracle on the square") {
    Polytope sq = square();
    auto ball = make_ball(1.0, 2);

    // p=0: per facet (x.nu)^1 = 1 over length 2, total (1/2)*4*2 = 4
    CHECK(curvature_boundary_oracle(sq, {0.0, 2.0, 0.0, ball}, kOne) ==
          Approx(4.0).epsilon(1e-12));
    // p=1: integrand 1, half the perimeter
    CHECK(curvature_boundary_oracle(sq, {1.0, 2.0, 0.0, ball}, kOne) ==
          Approx(4.0).epsilon(1e-12));
    CHECK(curvature_boundary_oracle(sq, {1.0, 2.0, 0.0, ball}, [](const Vec&) { return 0.0; }) ==
          0.0);
}

TEST_CASE("spherical and boundary routes agree on random bodies, n=2") {
    BodyGenerator gen(11, 2);
    for (int trial = 0; trial < 12; ++trial) {
        Polytope M = gen.random_polytope(3, 14);
        BodyPtr Q = gen.random_convex(12);
        double p = gen.uniform(-2.0, 4.0);
        double q = gen.uniform(-2.0, 4.0);
        double j = gen.uniform_int(0, 1);
        MeasureParams prm{p, q, j, Q};
        std::vector<const Polytope*> polys{&M};
        if (const Polytope* PQ = as_polytope(*Q)) polys.push_back(PQ);
        auto grid = cone_partitioned_grid(polys, 48);
        auto g = [&](const Vec& v) { return 1.0 + 0.5 * v(0) + 0.3 * v(0) * v(1); };
        double spherical = curvature_functional(M, prm, g, grid);
        double boundary = curvature_boundary_oracle(M, prm, g, 48);
        REQUIRE(spherical == Approx(boundary).epsilon(1e-8));
    }
}

TEST_CASE("spherical and boundary routes agree on random bodies, n=3") {
    BodyGenerator gen(12, 3);
    for (int trial = 0; trial < 5; ++trial) {
        Polytope M = gen.random_polytope(4, 10);
        BodyPtr Q = (trial % 2) ? make_polytope(gen.random_polytope(4, 8)) : gen.random_ellipsoid();
        double p = gen.uniform(-1.5, 3.0);
        double q = gen.uniform(-1.5, 3.0);
        double j = gen.uniform_int(0, 1);
        MeasureParams prm{p, q, j, Q};
        std::vector<const Polytope*> polys{&M};
        if (const Polytope* PQ = as_polytope(*Q)) polys.push_back(PQ);
        auto grid = cone_partitioned_grid(polys, 32);
        double spherical = curvature_functional(M, prm, kOne, grid);
        double boundary = curvature_boundary_oracle(M, prm, kOne, 32);
        REQUIRE(spherical == Approx(boundary).epsilon(1e-3));
    }
}

TEST_CASE("total mass equals the dual quermassintegral") {
    GridConfig cfg;
    cfg.estimate = false;
    BodyGenerator gen2(31, 2);
    Polytope M2 = gen2.random_polytope(3, 12);
    auto Q2 = gen2.random_ellipsoid();
    double q = 1.6, j = 1.0;
    auto grid2 = cone_partitioned_grid(M2, 32);
    auto mu2 = curvature_measure_polytope(M2, {0.0, q, j, Q2}, grid2);
    double w2 = dual_quermass(make_polytope(M2), Q2, q, j, cfg).value;
    CHECK(mu2.total() == Approx(w2).epsilon(1e-9));

    BodyGenerator gen3(32, 3);
    Polytope M3 = gen3.random_polytope(4, 9);
    auto Q3 = gen3.random_ellipsoid();
    auto grid3 = cone_partitioned_grid(M3, 32);
    auto mu3 = curvature_measure_polytope(M3, {0.0, q, j, Q3}, grid3);
    double w3 = dual_quermass(make_polytope(M3), Q3, q, j, cfg).value;
    CHECK(mu3.total() == Approx(w3).epsilon(1e-4));
}

TEST_CASE("atom homogeneity in M and Q") {
    BodyGenerator gen(41, 2);
    Polytope M = gen.random_polytope(3, 10);
    auto Q = gen.random_ellipsoid();
    double p = 1.3, q = 2.6, j = 1.0;
    auto grid = cone_partitioned_grid(M, 32);
    auto mu = curvature_measure_polytope(M, {p, q, j, Q}, grid);

    double lam = 1.9;
    Polytope Ms = scale_polytope(M, lam);
    auto grid_s = cone_partitioned_grid(Ms, 32);
    auto mu_m = curvature_measure_polytope(Ms, {p, q, j, Q}, grid_s);
    for (int i = 0; i < mu.atom_count(); ++i)
        REQUIRE(mu_m.masses(i) ==
                Approx(std::pow(lam, q - p) * mu.masses(i)).epsilon(1e-10));

    auto mu_q = curvature_measure_polytope(M, {p, q, j, radial_scale(lam, Q)}, grid);
    for (int i = 0; i < mu.atom_count(); ++i)
        REQUIRE(mu_q.masses(i) ==
                Approx(std::pow(lam, 2.0 - q - j) * mu.masses(i)).epsilon(1e-10));

    for (int i = 0; i < mu.atom_count(); ++i) REQUIRE(mu.masses(i) >= 0.0);
}

TEST_CASE("degenerate-parameter identities") {
    BodyGenerator gen(51, 2);
    Polytope M = gen.random_polytope(3, 11);
    auto Q = gen.random_ellipsoid();
    auto grid = cone_partitioned_grid(M, 32);
    auto rep = special_case_suite(M, Q, grid);
    CHECK(rep.max_rel_q_independence <= 1e-12);
    CHECK(rep.max_rel_p_zero <= 1e-12);
    CHECK(rep.max_rel_sp_identity <= 1e-10);

    Polytope cb = cube();
    auto grid3 = cone_partitioned_grid(cb, 32);
    auto rep3 = special_case_suite(cb, make_ball(1.3, 3), grid3);
    CHECK(rep3.max_rel_q_independence <= 1e-10);
    CHECK(rep3.max_rel_p_zero <= 1e-12);
    CHECK(rep3.max_rel_sp_identity <= 1e-6);
}
