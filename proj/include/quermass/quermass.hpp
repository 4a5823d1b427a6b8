#pragma once

// Dual and (p,q)-mixed quermassintegrals. Every quantity is a weighted
// radial integral over S^{n-1}; grids are chosen per call so that cone
// boundaries of any polytopal factor are honored. Paired identities are
// always evaluated on a shared grid, which keeps pointwise-equal
// integrands equal to roundoff regardless of the grid's own accuracy.

#include "quermass/body.hpp"
#include "quermass/curvature.hpp"
#include "quermass/quadrature.hpp"

#include <functional>

namespace quermass {

struct GridConfig {
    std::string scheme = "auto";  // auto | uniform-angle | product-gauss | mc | cone
    int resolution = 0;           // 0 = per-dimension default
    std::uint64_t seed = 1;
    int threads = 1;
    bool estimate = true;  // also evaluate a coarser companion grid
};

namespace detail {

inline int default_resolution(int n, bool cone) {
    if (n == 2) return cone ? 32 : 512;
    if (n == 3) return cone ? 32 : 48;
    return 200000;
}

inline int coarse_resolution(int n, bool cone, int res) {
    if (n == 2) return std::max(cone ? 8 : 64, res / 2);
    if (n == 3) return cone ? (res >= 24 ? 12 : 8) : std::max(12, res / 2);
    return std::max(1000, res / 4);
}

}  // namespace detail

// Grid for integrands built from the listed bodies; cone-partitioned as
// soon as one of them is a polytope (the first listed polytope owns the
// node-to-cone cache).
inline SphericalGrid make_grid(const GridConfig& cfg, int n, std::vector<const Body*> bodies,
                               int resolution_override = 0) {
    std::vector<const Polytope*> polys;
    for (const Body* b : bodies) {
        if (!b) continue;
        if (const Polytope* P = as_polytope(*b)) {
            bool dup = false;
            for (const Polytope* r : polys) dup = dup || r == P;
            if (!dup) polys.push_back(P);
        }
    }
    bool cone = !polys.empty() && n <= 3 && (cfg.scheme == "auto" || cfg.scheme == "cone");
    int res = resolution_override > 0 ? resolution_override
                                      : (cfg.resolution > 0 ? cfg.resolution
                                                            : detail::default_resolution(n, cone));
    if (cone) return cone_partitioned_grid(polys, res);
    if (cfg.scheme == "mc" || n >= 4) return build_grid(n, res, GridScheme::MonteCarlo, cfg.seed);
    if (n == 2) return build_grid(n, res, GridScheme::UniformAngle);
    return build_grid(n, res, GridScheme::ProductGauss);
}

struct QuermassResult {
    double value = 0.0;
    double error_estimate = 0.0;
    double p = 0.0, q = 0.0, j = 0.0;
    std::string body_m, body_n, body_q;
    std::string grid;
};

namespace detail {

// Evaluate the integral on the preferred grid; the error estimate is
// the difference against a coarser companion grid.
template <typename Evaluate>
QuermassResult integrate_with_estimate(const GridConfig& cfg, int n,
                                       std::vector<const Body*> bodies, Evaluate&& eval) {
    SphericalGrid grid = make_grid(cfg, n, bodies);
    QuermassResult out;
    out.value = eval(grid);
    out.grid = scheme_name(grid.scheme);
    if (cfg.estimate) {
        bool cone = grid.scheme == GridScheme::ConePartitioned;
        int res = coarse_resolution(n, cone, grid.resolution);
        SphericalGrid coarse = make_grid(cfg, n, bodies, res);
        double vc = eval(coarse);
        out.error_estimate = std::abs(out.value - vc) + 8e-15 * std::abs(out.value);
    } else {
        out.error_estimate = grid.err_hint * std::abs(out.value);
    }
    return out;
}

// alpha_M lookup: cached cone indices for polytopes, closed form otherwise.
struct GaussLookup {
    const Polytope* P = nullptr;
    const Body* M = nullptr;
    const SphericalGrid* grid = nullptr;

    Vec at(int node, const Vec& u) const {
        if (P && grid && !grid->cone.empty() && grid->cone[node] >= 0)
            return P->normals.col(grid->cone[node]);
        if (P) return P->normals.col(radial_gauss(*P, u));
        auto g = gauss_map(*M, u);
        if (!g) throw Error("radial Gauss map unavailable for body: " + M->label);
        return *g;
    }
};

}  // namespace detail

// (1/n) * integral of rho_M^q rho_Q^{n-q-j}.
inline QuermassResult dual_quermass(const BodyPtr& M, const BodyPtr& Q, double q, double j,
                                    const GridConfig& cfg = {}) {
    const int n = M->n;
    if (j == n) throw Error("dual quermassintegral needs j != n");
    auto res = detail::integrate_with_estimate(
        cfg, n, {M.get(), Q.get()}, [&](const SphericalGrid& grid) {
            double expo = n - q - j;
            return integrate(
                grid,
                [&](const Vec& u) {
                    return std::pow(radial_eval(*M, u), q) * std::pow(radial_eval(*Q, u), expo);
                },
                cfg.threads);
        });
    res.value /= n;
    res.error_estimate /= n;
    res.q = q;
    res.j = j;
    res.body_m = M->label;
    res.body_q = Q->label;
    return res;
}

// W_j(M) in the dual (radial) sense: (1/n) * integral of rho_M^{n-j}.
inline QuermassResult dual_wj(const BodyPtr& M, double j, const GridConfig& cfg = {}) {
    const int n = M->n;
    auto res =
        detail::integrate_with_estimate(cfg, n, {M.get()}, [&](const SphericalGrid& grid) {
            double expo = n - j;
            return integrate(
                grid, [&](const Vec& u) { return std::pow(radial_eval(*M, u), expo); },
                cfg.threads);
        });
    res.value /= n;
    res.error_estimate /= n;
    res.q = n - j;
    res.j = j;
    res.body_m = M->label;
    return res;
}

enum class PqRoute { Direct, AtomSum, Auto };

// (p,q)-mixed quermassintegral:
// (1/n) * integral of (h_N/h_M)^p(alpha_M(u)) rho_M^q(u) rho_Q^{n-q-j}(u).
// For polytopal M the atom route sums (h_N(v_i)/h_M(v_i))^p against the
// atoms of the q-th measure; both routes must agree.
inline QuermassResult pq_mixed_quermass(const BodyPtr& M, const BodyPtr& N, const BodyPtr& Q,
                                        double p, double q, double j, const GridConfig& cfg = {},
                                        PqRoute route = PqRoute::Auto) {
    const int n = M->n;
    if (j == n) throw Error("pq_mixed_quermass needs j != n");
    if (!M->convex || !N->convex) throw NonConvexBody("pq_mixed_quermass needs convex M, N");
    const Polytope* PM = as_polytope(*M);
    if (route == PqRoute::AtomSum && !PM) throw Error("atom route needs polytopal M");
    if (route == PqRoute::Auto) route = PM ? PqRoute::AtomSum : PqRoute::Direct;

    QuermassResult res;
    if (route == PqRoute::AtomSum) {
        SphericalGrid grid = make_grid(cfg, n, {M.get(), Q.get()});
        DiscreteSphericalMeasure base = curvature_measure_polytope(*PM, {0.0, q, j, Q}, grid);
        KahanSum acc;
        for (int i = 0; i < PM->facet_count(); ++i) {
            double ratio = support_eval(*N, PM->normals.col(i)) / PM->support(i);
            acc.add(std::pow(ratio, p) * base.masses(i));
        }
        res.value = acc.value();
        res.grid = scheme_name(grid.scheme);
        res.error_estimate = (cfg.estimate ? 1e-12 : grid.err_hint) * std::abs(res.value);
        if (cfg.estimate) {
            SphericalGrid coarse =
                make_grid(cfg, n, {M.get(), Q.get()},
                          detail::coarse_resolution(n, true, grid.resolution));
            DiscreteSphericalMeasure cb = curvature_measure_polytope(*PM, {0.0, q, j, Q}, coarse);
            KahanSum cacc;
            for (int i = 0; i < PM->facet_count(); ++i) {
                double ratio = support_eval(*N, PM->normals.col(i)) / PM->support(i);
                cacc.add(std::pow(ratio, p) * cb.masses(i));
            }
            res.error_estimate = std::abs(res.value - cacc.value()) + 8e-15 * std::abs(res.value);
        }
    } else {
        res = detail::integrate_with_estimate(
            cfg, n, {M.get(), N.get(), Q.get()}, [&](const SphericalGrid& grid) {
                detail::GaussLookup lookup{PM, M.get(), &grid};
                double expo = n - q - j;
                return integrate_indexed(
                    grid,
                    [&](int i, const Vec& u) {
                        Vec alpha = lookup.at(i, u);
                        double ratio = support_eval(*N, alpha) / support_eval(*M, alpha);
                        return std::pow(ratio, p) * std::pow(radial_eval(*M, u), q) *
                               std::pow(radial_eval(*Q, u), expo);
                    },
                    cfg.threads);
            });
        res.value /= n;
        res.error_estimate /= n;
    }
    res.p = p;
    res.q = q;
    res.j = j;
    res.body_m = M->label;
    res.body_n = N->label;
    res.body_q = Q->label;
    return res;
}

// (1/n) * integral of (h_N/h_M)^p(alpha_M(u)) rho_M^{n-j}(u).
inline QuermassResult lp_mixed_quermass_paper(const BodyPtr& M, const BodyPtr& N, double p,
                                              double j, const GridConfig& cfg = {}) {
    const int n = M->n;
    const Polytope* PM = as_polytope(*M);
    auto res = detail::integrate_with_estimate(
        cfg, n, {M.get(), N.get()}, [&](const SphericalGrid& grid) {
            detail::GaussLookup lookup{PM, M.get(), &grid};
            double expo = n - j;
            return integrate_indexed(
                grid,
                [&](int i, const Vec& u) {
                    Vec alpha = lookup.at(i, u);
                    double ratio = support_eval(*N, alpha) / support_eval(*M, alpha);
                    return std::pow(ratio, p) * std::pow(radial_eval(*M, u), expo);
                },
                cfg.threads);
        });
    res.value /= n;
    res.error_estimate /= n;
    res.p = p;
    res.j = j;
    res.body_m = M->label;
    res.body_n = N->label;
    return res;
}

// ---- identity suite ------------------------------------------------------

struct IdentityReport {
    // residuals for the six degenerations, relative to the larger side
    double r_self = 0, r_mmq = 0, r_qm = 0, r_pzero = 0, r_qn = 0, r_jzero = 0;
    double max_rel() const {
        return std::max({r_self, r_mmq, r_qm, r_pzero, r_qn, r_jzero});
    }
};

inline double rel_gap(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

inline IdentityReport identity_suite(const BodyPtr& M, const BodyPtr& N, const BodyPtr& Q,
                                     double p, double q, double j, const GridConfig& cfg = {}) {
    const int n = M->n;
    IdentityReport rep;
    GridConfig fast = cfg;
    fast.estimate = false;

    rep.r_self = rel_gap(pq_mixed_quermass(M, M, M, p, q, j, fast).value,
                         dual_wj(M, j, fast).value);
    rep.r_mmq = rel_gap(pq_mixed_quermass(M, M, Q, p, q, j, fast).value,
                        dual_quermass(M, Q, q, j, fast).value);
    rep.r_qm = rel_gap(pq_mixed_quermass(M, N, M, p, q, j, fast).value,
                       lp_mixed_quermass_paper(M, N, p, j, fast).value);
    rep.r_pzero = rel_gap(pq_mixed_quermass(M, N, Q, 0.0, q, j, fast).value,
                          dual_quermass(M, Q, q, j, fast).value);
    // q = n collapses onto the L_p formula only when the Q-exponent
    // n-q-j vanishes, i.e. at j = 0
    rep.r_qn = rel_gap(pq_mixed_quermass(M, N, Q, p, n, 0.0, fast).value,
                       lp_mixed_quermass_paper(M, N, p, 0.0, fast).value);
    if (as_polytope(*M)) {
        rep.r_jzero = rel_gap(pq_mixed_quermass(M, N, Q, p, q, 0.0, fast, PqRoute::Direct).value,
                              pq_mixed_quermass(M, N, Q, p, q, 0.0, fast, PqRoute::AtomSum).value);
    } else {
        rep.r_jzero = 0.0;
    }
    return rep;
}

// ---- variational check ----------------------------------------------------

struct VariationalReport {
    double derivative = 0.0;       // Richardson-extrapolated central difference
    double expected = 0.0;         // (q/p) * pq-mixed quermassintegral
    double rel_gap = 0.0;
    std::vector<double> step_gaps;  // per-step relative gaps
};

// Central differences of t -> W_{q,j}(M +_p tN, Q) at t=0 against the
// measure-side value. Steps where the combination loses positivity are
// skipped.
inline VariationalReport variational_check(const BodyPtr& M, const BodyPtr& N, const BodyPtr& Q,
                                           double p, double q, double j,
                                           const GridConfig& cfg = {},
                                           std::vector<double> steps = {1e-2, 1e-3, 1e-4}) {
    if (p == 0.0 || q == 0.0) throw Error("variational check needs p, q != 0");
    GridConfig fast = cfg;
    fast.estimate = false;
    auto W = [&](double t) {
        BodyPtr comb = lp_combination(M, N, 1.0, t, p);
        return dual_quermass(comb, Q, q, j, fast).value;
    };
    VariationalReport rep;
    rep.expected = (q / p) * pq_mixed_quermass(M, N, Q, p, q, j, fast).value;

    std::vector<double> ds;
    for (double s : steps) {
        try {
            double d = (W(s) - W(-s)) / (2.0 * s);
            ds.push_back(d);
            rep.step_gaps.push_back(std::abs(d - rep.expected) / std::abs(rep.expected));
        } catch (const NonPositiveCombination&) {
            // step too large for this body pair
        }
    }
    if (ds.empty()) throw Error("variational check: no admissible step");
    if (ds.size() >= 2) {
        // steps shrink by 10, so the t^2 error term drops by 100
        double fine = ds.back(), prev = ds[ds.size() - 2];
        rep.derivative = (100.0 * fine - prev) / 99.0;
    } else {
        rep.derivative = ds.back();
    }
    rep.rel_gap = std::abs(rep.derivative - rep.expected) / std::abs(rep.expected);
    return rep;
}

// ---- covariance and valuation ----------------------------------------------

struct CovarianceReport {
    double lhs = 0, rhs = 0, ratio_error = 0;
};

inline CovarianceReport gl_covariance_check(const BodyPtr& M, const BodyPtr& N, const BodyPtr& Q,
                                            const Mat& phi, double p, double q, double j,
                                            const GridConfig& cfg = {}) {
    Eigen::FullPivLU<Mat> lu(phi);
    if (!lu.isInvertible()) throw SingularMatrix("gl_covariance_check needs invertible phi");
    GridConfig fast = cfg;
    fast.estimate = false;
    CovarianceReport rep;
    rep.lhs = pq_mixed_quermass(apply_linear(M, phi), apply_linear(N, phi), apply_linear(Q, phi),
                                p, q, j, fast)
                  .value;
    rep.rhs = std::abs(phi.determinant()) * pq_mixed_quermass(M, N, Q, p, q, j, fast).value;
    rep.ratio_error = std::abs(rep.lhs / rep.rhs - 1.0);
    return rep;
}

struct ValuationReport {
    double lhs = 0, rhs = 0, residual = 0;
};

// W(M,N,Q1 u Q2) + W(M,N,Q1 n Q2) = W(M,N,Q1) + W(M,N,Q2); all four
// terms share one grid, the radial identity behind it is pointwise.
inline ValuationReport valuation_check_starbody(const BodyPtr& M, const BodyPtr& N,
                                                const BodyPtr& Q1, const BodyPtr& Q2, double p,
                                                double q, double j, const GridConfig& cfg = {}) {
    const int n = M->n;
    SphericalGrid grid = make_grid(cfg, n, {M.get(), Q1.get(), Q2.get()});
    const Polytope* PM = as_polytope(*M);
    auto term = [&](const BodyPtr& Qb) {
        detail::GaussLookup lookup{PM, M.get(), &grid};
        double expo = n - q - j;
        return integrate_indexed(grid,
                                 [&](int i, const Vec& u) {
                                     Vec alpha = lookup.at(i, u);
                                     double ratio =
                                         support_eval(*N, alpha) / support_eval(*M, alpha);
                                     return std::pow(ratio, p) *
                                            std::pow(radial_eval(*M, u), q) *
                                            std::pow(radial_eval(*Qb, u), expo);
                                 },
                                 cfg.threads) /
               n;
    };
    ValuationReport rep;
    rep.lhs = term(star_union(Q1, Q2)) + term(star_intersection(Q1, Q2));
    rep.rhs = term(Q1) + term(Q2);
    rep.residual = std::abs(rep.lhs - rep.rhs) / std::max(std::abs(rep.lhs), std::abs(rep.rhs));
    return rep;
}

}  // namespace quermass
