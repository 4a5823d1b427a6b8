#pragma once

// Dual mixed curvature measures of polytopes. Two independent routes
// are kept side by side: cone integrals over the sphere (the atoms of
// the measure) and facet integrals over the boundary. Their agreement
// is the working check for the change-of-variables identity behind the
// whole construction, so neither route may call into the other.

#include "quermass/body.hpp"
#include "quermass/quadrature.hpp"

#include <functional>

namespace quermass {

struct DiscreteSphericalMeasure {
    int dim = 0;
    Mat directions;  // n x k, unit columns, pairwise distinct
    Vec masses;      // k, nonnegative

    int atom_count() const { return static_cast<int>(masses.size()); }
    double total() const {
        KahanSum s;
        for (int i = 0; i < masses.size(); ++i) s.add(masses(i));
        return s.value();
    }
};

struct MeasureParams {
    double p = 0.0;
    double q = 2.0;
    double j = 0.0;  // quermassintegral index, j != n
    BodyPtr Q;       // star body
};

namespace detail {

inline void check_cone_grid(const Polytope& M, const SphericalGrid& grid) {
    if (grid.scheme != GridScheme::ConePartitioned || grid.cone.empty())
        throw Error("operation needs a cone-partitioned grid of the polytope");
    if (grid.dim != M.dim()) throw Error("grid dimension mismatch");
}

// Per-facet integrals of rho_M^q rho_Q^{n-q-j} over the cones.
inline Vec cone_base_integrals(const Polytope& M, const BodyPtr& Q, double q, double j,
                               const SphericalGrid& grid) {
    check_cone_grid(M, grid);
    const int n = M.dim();
    const double expo = n - q - j;
    std::vector<KahanSum> acc(M.facet_count());
    for (int i = 0; i < grid.node_count(); ++i) {
        int c = grid.cone[i];
        if (c < 0 || c >= M.facet_count()) throw Error("grid cone index out of range");
        Vec u = grid.nodes.col(i);
        double v = std::pow(polytope_radial(M, u), q) * std::pow(radial_eval(*Q, u), expo);
        if (!std::isfinite(v)) throw NonFiniteIntegrand("cone integrand not finite");
        acc[c].add(grid.weights(i) * v);
    }
    Vec out(M.facet_count());
    for (int i = 0; i < M.facet_count(); ++i) out(i) = acc[i].value();
    return out;
}

}  // namespace detail

// Atoms of the (p,q)-dual mixed curvature measure of a polytope:
// (1/n) h_i^{-p} * integral over the i-th cone of rho_M^q rho_Q^{n-q-j}.
inline DiscreteSphericalMeasure curvature_measure_polytope(const Polytope& M,
                                                           const MeasureParams& prm,
                                                           const SphericalGrid& grid) {
    Vec base = detail::cone_base_integrals(M, prm.Q, prm.q, prm.j, grid);
    DiscreteSphericalMeasure mu;
    mu.dim = M.dim();
    mu.directions = M.normals;
    mu.masses.resize(M.facet_count());
    for (int i = 0; i < M.facet_count(); ++i)
        mu.masses(i) = std::pow(M.support(i), -prm.p) * base(i) / M.dim();
    return mu;
}

// Integral of g against the measure, through the cached node-to-cone map.
inline double curvature_functional(const Polytope& M, const MeasureParams& prm,
                                   const std::function<double(const Vec&)>& g,
                                   const SphericalGrid& grid) {
    detail::check_cone_grid(M, grid);
    const int n = M.dim();
    const double expo = n - prm.q - prm.j;
    Vec gh(M.facet_count());
    for (int i = 0; i < M.facet_count(); ++i) {
        double gv = g(Vec(M.normals.col(i)));
        if (!std::isfinite(gv)) throw NonFiniteIntegrand("g not finite at a facet normal");
        gh(i) = gv * std::pow(M.support(i), -prm.p);
    }
    KahanSum acc;
    for (int i = 0; i < grid.node_count(); ++i) {
        Vec u = grid.nodes.col(i);
        double v = gh(grid.cone[i]) * std::pow(polytope_radial(M, u), prm.q) *
                   std::pow(radial_eval(*prm.Q, u), expo);
        if (!std::isfinite(v)) throw NonFiniteIntegrand("curvature integrand not finite");
        acc.add(grid.weights(i) * v);
    }
    return acc.value() / n;
}

// ---- boundary route ----------------------------------------------------

namespace detail {

// 1D integral of |x|^{-j} ||x||_Q^{q+j-n} along a segment, split exactly
// where the segment crosses cone boundaries of a polytopal Q, then
// bisected until each piece subtends a small angle at the origin (the
// scale on which the integrand varies).
inline double segment_gauge_integral(const Vec& a, const Vec& b, const BodyPtr& Q, double q,
                                     double j, int n, int nodes) {
    std::vector<double> cuts{0.0, 1.0};
    if (const Polytope* PQ = as_polytope(*Q)) {
        for (int k = 0; k < PQ->vertex_count(); ++k) {
            Vec d = PQ->vertices.col(k);
            double fa = a(0) * d(1) - a(1) * d(0);
            double fb = b(0) * d(1) - b(1) * d(0);
            if ((fa > 0 && fb < 0) || (fa < 0 && fb > 0)) {
                double s = fa / (fa - fb);
                Vec x = a + s * (b - a);
                if (x.dot(d) > 0.0 && s > 1e-14 && s < 1.0 - 1e-14) cuts.push_back(s);
            }
        }
        std::sort(cuts.begin(), cuts.end());
    }
    auto point = [&](double s) -> Vec { return a + s * (b - a); };
    const double max_angle = kPi / 16.0;
    std::vector<double> refined{0.0};
    for (size_t c = 0; c + 1 < cuts.size(); ++c) {
        std::vector<double> stack{cuts[c + 1]};
        double lo = cuts[c];
        while (!stack.empty()) {
            double hi = stack.back();
            Vec xa = point(lo), xb = point(hi);
            double cosang = xa.dot(xb) / (xa.norm() * xb.norm());
            if (cosang < std::cos(max_angle) && hi - lo > 1e-12) {
                stack.push_back(0.5 * (lo + hi));
            } else {
                refined.push_back(hi);
                lo = hi;
                stack.pop_back();
            }
        }
    }
    const auto& [gx, gw] = gauss_legendre(nodes);
    double len = (b - a).norm();
    KahanSum acc;
    for (size_t c = 0; c + 1 < refined.size(); ++c) {
        double mid = 0.5 * (refined[c] + refined[c + 1]);
        double half = 0.5 * (refined[c + 1] - refined[c]);
        if (half <= 0) continue;
        for (int i = 0; i < gx.size(); ++i) {
            double s = mid + half * gx(i);
            Vec x = point(s);
            double v = std::pow(x.norm(), -j) * std::pow(norm_gauge(*Q, x), q + j - n);
            if (!std::isfinite(v)) throw NonFiniteIntegrand("boundary integrand not finite");
            acc.add(half * len * gw(i) * v);
        }
    }
    return acc.value();
}

// The two endpoints of an edge facet (n=2).
inline std::pair<Vec, Vec> edge_endpoints(const Polytope& P, int i) {
    const auto& fv = P.facet_vertices[i];
    double best = -1.0;
    std::pair<int, int> arg{fv[0], fv[0]};
    for (size_t p = 0; p < fv.size(); ++p)
        for (size_t r = p + 1; r < fv.size(); ++r) {
            double d = (P.vertices.col(fv[p]) - P.vertices.col(fv[r])).norm();
            if (d > best) { best = d; arg = {fv[p], fv[r]}; }
        }
    return {Vec(P.vertices.col(arg.first)), Vec(P.vertices.col(arg.second))};
}

// Flat-triangle integral of |x|^{-j} ||x||_Q^{q+j-n}; straddling
// triangles are refined, then split exactly on the tie planes of a
// polytopal Q before the degree-5 rule is applied.
struct FacetTriIntegrator {
    const Polytope* PQ = nullptr;  // Q when polytopal
    const Body* Q = nullptr;
    double q = 0, j = 0;
    int n = 3;
    double diam_floor = 0.05;
    double angle_target = 0.1;  // resolve the integrand's angular scale
    int max_depth = 9;

    bool straddles(const Tri& t) const {
        if (!PQ) return false;
        int a = radial_gauss(*PQ, t[0]), b = radial_gauss(*PQ, t[1]), c = radial_gauss(*PQ, t[2]);
        return a != b || b != c;
    }

    double leaf(const Tri& t) const {
        std::vector<Tri> pieces{t};
        if (PQ) {
            std::array<int, 3> as{radial_gauss(*PQ, t[0]), radial_gauss(*PQ, t[1]),
                                  radial_gauss(*PQ, t[2])};
            for (int i = 0; i < 3; ++i)
                for (int k = i + 1; k < 3; ++k) {
                    if (as[i] == as[k]) continue;
                    Eigen::Vector3d tie = PQ->support(as[i]) * PQ->normals.col(as[k]) -
                                          PQ->support(as[k]) * PQ->normals.col(as[i]);
                    if (tie.norm() < 1e-14) continue;
                    tie.normalize();
                    std::vector<Tri> next;
                    for (const Tri& piece : pieces) {
                        auto cut = clip_triangle(piece, tie);
                        next.insert(next.end(), cut.begin(), cut.end());
                    }
                    pieces = std::move(next);
                }
        }
        const TriangleRule& rule = triangle_rule();
        double acc = 0.0;
        for (const Tri& piece : pieces) {
            double area = 0.5 * (piece[1] - piece[0]).cross(piece[2] - piece[0]).norm();
            if (!(area > 1e-300)) continue;
            for (int i = 0; i < 7; ++i) {
                Eigen::Vector3d x = rule.bary[i][0] * piece[0] + rule.bary[i][1] * piece[1] +
                                    rule.bary[i][2] * piece[2];
                double v = std::pow(x.norm(), -j) * std::pow(norm_gauge(*Q, Vec(x)), q + j - n);
                if (!std::isfinite(v)) throw NonFiniteIntegrand("facet integrand not finite");
                acc += area * rule.w[i] * v;
            }
        }
        return acc;
    }

    double visit(const Tri& t, int depth) const {
        double diam = std::max({(t[0] - t[1]).norm(), (t[1] - t[2]).norm(), (t[0] - t[2]).norm()});
        double dist = std::min({t[0].norm(), t[1].norm(), t[2].norm()});
        bool want = depth < 1;
        if (!want && depth < max_depth && diam > angle_target * dist) want = true;
        if (!want && depth < max_depth && diam > diam_floor && straddles(t)) want = true;
        if (!want) return leaf(t);
        Eigen::Vector3d ab = 0.5 * (t[0] + t[1]);
        Eigen::Vector3d bc = 0.5 * (t[1] + t[2]);
        Eigen::Vector3d ca = 0.5 * (t[2] + t[0]);
        return visit({t[0], ab, ca}, depth + 1) + visit({ab, t[1], bc}, depth + 1) +
               visit({ca, bc, t[2]}, depth + 1) + visit({ab, bc, ca}, depth + 1);
    }
};

}  // namespace detail

// Boundary form of the measure applied to g(nu_M): per facet,
// (1/n) g(v_i) h_i^{1-p} * integral of |x|^{-j} ||x||_Q^{q+j-n} dH^{n-1}.
inline double curvature_boundary_oracle(const Polytope& M, const MeasureParams& prm,
                                        const std::function<double(const Vec&)>& g,
                                        int density = 32) {
    const int n = M.dim();
    if (n != 2 && n != 3) throw UnsupportedDimension("boundary oracle is n=2,3 only");
    KahanSum acc;
    for (int i = 0; i < M.facet_count(); ++i) {
        double gv = g(Vec(M.normals.col(i)));
        if (gv == 0.0) continue;
        double factor = gv * std::pow(M.support(i), 1.0 - prm.p);
        if (n == 2) {
            auto [a, b] = detail::edge_endpoints(M, i);
            acc.add(factor *
                    detail::segment_gauge_integral(a, b, prm.Q, prm.q, prm.j, n, density));
        } else {
            const auto& fv = M.facet_vertices[i];
            Eigen::Vector3d c = Eigen::Vector3d::Zero();
            for (int k : fv) c += Eigen::Vector3d(M.vertices.col(k));
            c /= static_cast<double>(fv.size());
            double fscale = 0.0;
            for (int k : fv)
                fscale = std::max(fscale, (Eigen::Vector3d(M.vertices.col(k)) - c).norm());
            detail::FacetTriIntegrator integ;
            integ.PQ = as_polytope(*prm.Q);
            integ.Q = prm.Q.get();
            integ.q = prm.q;
            integ.j = prm.j;
            integ.n = n;
            integ.diam_floor = std::max(1e-6, fscale * std::pow(2.0, -4.0));
            double expo_scale = std::abs(prm.q + prm.j - n) + std::abs(prm.j);
            integ.angle_target = std::max(0.025, 0.15 / (1.0 + expo_scale));
            double sum = 0.0;
            for (size_t k = 0; k < fv.size(); ++k) {
                detail::Tri t{c, Eigen::Vector3d(M.vertices.col(fv[k])),
                              Eigen::Vector3d(M.vertices.col(fv[(k + 1) % fv.size()]))};
                sum += integ.visit(t, 0);
            }
            acc.add(factor * sum);
        }
    }
    return acc.value() / n;
}

// ---- special cases ------------------------------------------------------

struct SpecialCaseReport {
    double max_rel_q_independence = 0.0;   // C(p,q,0)(M,M) atoms across q
    double max_rel_sp_identity = 0.0;      // atoms vs (1/n) h^{1-p} * facet area
    double max_rel_p_zero = 0.0;           // p=0 route vs plain route
    double max_rel() const {
        return std::max({max_rel_q_independence, max_rel_sp_identity, max_rel_p_zero});
    }
};

// Checks the degenerate-parameter identities: C(p,q,0)(M,M,.) does not
// depend on q and matches C(p,n,0)(M,B,.), both equal (1/n) S_p(M,.);
// and p=0 reduces to the plain q-th measure computed without any
// support-number factor.
inline SpecialCaseReport special_case_suite(const Polytope& M, const BodyPtr& Q,
                                            const SphericalGrid& grid) {
    SpecialCaseReport rep;
    const int n = M.dim();
    BodyPtr Mbody = make_polytope(M);
    BodyPtr ball = make_ball(1.0, n);

    for (double p : {0.0, 1.0, 2.5}) {
        DiscreteSphericalMeasure ref =
            curvature_measure_polytope(M, {p, static_cast<double>(n), 0.0, ball}, grid);
        for (double q : {1.3, 3.1}) {
            DiscreteSphericalMeasure mm = curvature_measure_polytope(M, {p, q, 0.0, Mbody}, grid);
            for (int i = 0; i < M.facet_count(); ++i) {
                double rel = std::abs(mm.masses(i) - ref.masses(i)) / std::abs(ref.masses(i));
                rep.max_rel_q_independence = std::max(rep.max_rel_q_independence, rel);
            }
        }
        for (int i = 0; i < M.facet_count(); ++i) {
            double sp = std::pow(M.support(i), 1.0 - p) * facet_area(M, i) / n;
            double rel = std::abs(ref.masses(i) - sp) / std::abs(sp);
            rep.max_rel_sp_identity = std::max(rep.max_rel_sp_identity, rel);
        }
    }

    // p = 0: the weighted route against a plain cone integral that never
    // touches the support numbers
    for (double q : {0.7, 2.4}) {
        double j = 0.0;
        DiscreteSphericalMeasure via_p = curvature_measure_polytope(M, {0.0, q, j, Q}, grid);
        Vec plain = detail::cone_base_integrals(M, Q, q, j, grid) / n;
        for (int i = 0; i < M.facet_count(); ++i) {
            double rel = std::abs(via_p.masses(i) - plain(i)) /
                         std::max(1e-300, std::abs(plain(i)));
            rep.max_rel_p_zero = std::max(rep.max_rel_p_zero, rel);
        }
    }
    return rep;
}

}  // namespace quermass
