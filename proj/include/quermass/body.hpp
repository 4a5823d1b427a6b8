#pragma once

// Star- and convex-body descriptions with exact radial/support oracles.
// Bodies are immutable; operations hand out shared pointers, so all
// evaluation is safe to run from many threads at once.

#include "quermass/common.hpp"
#include "quermass/polytope.hpp"

#include <memory>
#include <optional>
#include <sstream>
#include <variant>

namespace quermass {

class Body;
using BodyPtr = std::shared_ptr<const Body>;

struct BallData { double radius; };
struct EllipsoidData { Vec semiaxes; };
struct LinearData { Mat map; Mat inv; BodyPtr inner; };
struct PolarData { BodyPtr inner; };
struct StarUnionData { BodyPtr a, b; };
struct StarIntersectionData { BodyPtr a, b; };
struct ScaleData { double factor; BodyPtr inner; };
// Slab body: |x . e1| <= alpha intersected with the unit cylinder over
// the orthogonal complement of e1.
struct SlabData { double alpha; };

class Body {
public:
    using Rep = std::variant<BallData, EllipsoidData, Polytope, LinearData, PolarData,
                             StarUnionData, StarIntersectionData, ScaleData, SlabData>;

    Body(Rep rep, int n, bool convex, std::string label)
        : rep(std::move(rep)), n(n), convex(convex), label(std::move(label)) {}

    Rep rep;
    int n;
    bool convex;
    std::string label;
};

// ---- factories -------------------------------------------------------

inline BodyPtr make_ball(double radius, int n) {
    if (!(radius > 0.0)) throw DegenerateBody("ball radius must be positive");
    std::ostringstream s;
    s << "ball(" << radius << ")";
    return std::make_shared<Body>(BallData{radius}, n, true, s.str());
}

inline BodyPtr make_ellipsoid(Vec semiaxes) {
    if (semiaxes.size() < 2 || (semiaxes.array() <= 0.0).any())
        throw DegenerateBody("ellipsoid semiaxes must be positive");
    int n = static_cast<int>(semiaxes.size());
    return std::make_shared<Body>(EllipsoidData{std::move(semiaxes)}, n, true, "ellipsoid");
}

inline BodyPtr make_polytope(Polytope poly, std::string label = "polytope") {
    int n = poly.dim();
    return std::make_shared<Body>(std::move(poly), n, true, std::move(label));
}

inline BodyPtr make_polytope_h(const Mat& normals, const Vec& h) {
    return make_polytope(wulff_shape(normals, h).poly, "polytope-h");
}

inline BodyPtr make_polytope_v(const Mat& points) {
    return make_polytope(convex_hull(points).poly, "polytope-v");
}

// Convex hull of the radial graph {rho(u) u}.
inline BodyPtr convex_hull_of_radial(const Mat& directions, const Vec& rho) {
    if (rho.size() != directions.cols()) throw Error("directions/rho size mismatch");
    Mat pts(directions.rows(), directions.cols());
    for (int k = 0; k < directions.cols(); ++k) {
        if (!(rho(k) > 0.0)) throw DegenerateBody("radial values must be positive");
        pts.col(k) = unitize(directions.col(k)) * rho(k);
    }
    return make_polytope(convex_hull(pts).poly, "radial-hull");
}

inline BodyPtr make_slab(double alpha, int n) {
    if (!(alpha > 0.0)) throw DegenerateBody("slab half-width must be positive");
    return std::make_shared<Body>(SlabData{alpha}, n, true, "slab");
}

inline BodyPtr star_union(BodyPtr a, BodyPtr b) {
    if (a->n != b->n) throw Error("star_union dimension mismatch");
    int n = a->n;
    return std::make_shared<Body>(StarUnionData{std::move(a), std::move(b)}, n, false, "star-union");
}

inline BodyPtr star_intersection(BodyPtr a, BodyPtr b) {
    if (a->n != b->n) throw Error("star_intersection dimension mismatch");
    int n = a->n;
    return std::make_shared<Body>(StarIntersectionData{std::move(a), std::move(b)}, n, false,
                                  "star-intersection");
}

inline BodyPtr radial_scale(double lambda, const BodyPtr& inner) {
    if (!(lambda > 0.0)) throw DegenerateBody("scale factor must be positive");
    if (auto* p = std::get_if<Polytope>(&inner->rep))
        return make_polytope(scale_polytope(*p, lambda), inner->label);
    if (auto* b = std::get_if<BallData>(&inner->rep)) return make_ball(lambda * b->radius, inner->n);
    if (auto* e = std::get_if<EllipsoidData>(&inner->rep))
        return make_ellipsoid(lambda * e->semiaxes);
    return std::make_shared<Body>(ScaleData{lambda, inner}, inner->n, inner->convex, "scaled");
}

// The polytope behind a body, when it is one.
inline const Polytope* as_polytope(const Body& body) { return std::get_if<Polytope>(&body.rep); }
inline const Polytope* as_polytope(const BodyPtr& body) { return as_polytope(*body); }

// ---- evaluation ------------------------------------------------------

inline double radial_eval(const Body& body, const Vec& x);

inline double support_eval(const Body& body, const Vec& x) {
    if (!body.convex) throw NonConvexBody("support function needs a convex body: " + body.label);
    if (!x.allFinite()) throw Error("support_eval on non-finite vector");
    return std::visit(
        [&](const auto& rep) -> double {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, BallData>) {
                return rep.radius * x.norm();
            } else if constexpr (std::is_same_v<T, EllipsoidData>) {
                return (rep.semiaxes.array() * x.array()).matrix().norm();
            } else if constexpr (std::is_same_v<T, Polytope>) {
                return polytope_support(rep, x);
            } else if constexpr (std::is_same_v<T, LinearData>) {
                return support_eval(*rep.inner, rep.map.transpose() * x);
            } else if constexpr (std::is_same_v<T, PolarData>) {
                return 1.0 / radial_eval(*rep.inner, x);
            } else if constexpr (std::is_same_v<T, ScaleData>) {
                return rep.factor * support_eval(*rep.inner, x);
            } else if constexpr (std::is_same_v<T, SlabData>) {
                double head = std::abs(x(0));
                double tail = x.tail(x.size() - 1).norm();
                return rep.alpha * head + tail;
            } else {
                throw NonConvexBody("support function undefined for " + body.label);
            }
        },
        body.rep);
}

inline double radial_eval(const Body& body, const Vec& x) {
    double r = x.norm();
    if (!(r > 1e-300) || !x.allFinite()) throw ZeroVector("radial function needs a nonzero vector");
    return std::visit(
        [&](const auto& rep) -> double {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, BallData>) {
                return rep.radius / r;
            } else if constexpr (std::is_same_v<T, EllipsoidData>) {
                return 1.0 / (x.array() / rep.semiaxes.array()).matrix().norm();
            } else if constexpr (std::is_same_v<T, Polytope>) {
                return polytope_radial(rep, x);
            } else if constexpr (std::is_same_v<T, LinearData>) {
                return radial_eval(*rep.inner, rep.inv * x);
            } else if constexpr (std::is_same_v<T, PolarData>) {
                return 1.0 / support_eval(*rep.inner, x);
            } else if constexpr (std::is_same_v<T, StarUnionData>) {
                return std::max(radial_eval(*rep.a, x), radial_eval(*rep.b, x));
            } else if constexpr (std::is_same_v<T, StarIntersectionData>) {
                return std::min(radial_eval(*rep.a, x), radial_eval(*rep.b, x));
            } else if constexpr (std::is_same_v<T, ScaleData>) {
                return rep.factor * radial_eval(*rep.inner, x);
            } else {
                // slab
                const auto& s = std::get<SlabData>(body.rep);
                double head = std::abs(x(0));
                double tail = x.tail(x.size() - 1).norm();
                double t = std::numeric_limits<double>::infinity();
                if (head > 0.0) t = s.alpha / head;
                if (tail > 0.0) t = std::min(t, 1.0 / tail);
                return t;
            }
        },
        body.rep);
}

// Gauge of Q: zero at the origin, 1/rho_Q elsewhere.
inline double norm_gauge(const Body& Q, const Vec& x) {
    if (x.norm() == 0.0) return 0.0;
    return 1.0 / radial_eval(Q, x);
}

// ---- structural operations -------------------------------------------

inline BodyPtr polar(const BodyPtr& body) {
    if (!body->convex) throw NonConvexBody("polar needs a convex body");
    if (auto* b = std::get_if<BallData>(&body->rep)) return make_ball(1.0 / b->radius, body->n);
    if (auto* e = std::get_if<EllipsoidData>(&body->rep))
        return make_ellipsoid(e->semiaxes.cwiseInverse());
    if (auto* p = std::get_if<Polytope>(&body->rep))
        return make_polytope(polar_polytope(*p), body->label + "*");
    if (auto* q = std::get_if<PolarData>(&body->rep)) return q->inner;  // (M*)* = M
    return std::make_shared<Body>(PolarData{body}, body->n, true, body->label + "*");
}

inline BodyPtr apply_linear(const BodyPtr& body, const Mat& map) {
    Eigen::FullPivLU<Mat> lu(map);
    if (!lu.isInvertible()) throw SingularMatrix("apply_linear needs an invertible matrix");
    if (auto* p = std::get_if<Polytope>(&body->rep))
        return make_polytope(linear_image(*p, map), body->label + "'");
    return std::make_shared<Body>(LinearData{map, lu.inverse(), body}, body->n, body->convex,
                                  body->label + "'");
}

// Normal at the radial boundary point along u (the radial Gauss map).
// Closed-form per variant; absent for shapes where it is not needed.
inline std::optional<Vec> gauss_map(const Body& body, const Vec& u) {
    return std::visit(
        [&](const auto& rep) -> std::optional<Vec> {
            using T = std::decay_t<decltype(rep)>;
            if constexpr (std::is_same_v<T, BallData>) {
                return unitize(u);
            } else if constexpr (std::is_same_v<T, EllipsoidData>) {
                return unitize((u.array() / rep.semiaxes.array().square()).matrix());
            } else if constexpr (std::is_same_v<T, Polytope>) {
                return Vec(rep.normals.col(radial_gauss(rep, u)));
            } else if constexpr (std::is_same_v<T, ScaleData>) {
                return gauss_map(*rep.inner, u);
            } else if constexpr (std::is_same_v<T, LinearData>) {
                auto inner = gauss_map(*rep.inner, unitize(rep.inv * u));
                if (!inner) return std::nullopt;
                return unitize(rep.inv.transpose() * *inner);
            } else if constexpr (std::is_same_v<T, SlabData>) {
                double head = std::abs(u(0));
                double tail = u.tail(u.size() - 1).norm();
                double tface = head > 0.0 ? rep.alpha / head : std::numeric_limits<double>::infinity();
                double tside = tail > 0.0 ? 1.0 / tail : std::numeric_limits<double>::infinity();
                Vec w = Vec::Zero(u.size());
                if (tface <= tside) {
                    w(0) = u(0) > 0.0 ? 1.0 : -1.0;
                } else {
                    w.tail(u.size() - 1) = u.tail(u.size() - 1) / tail;
                }
                return w;
            } else {
                return std::nullopt;
            }
        },
        body.rep);
}

// ---- L_p Minkowski combination ----------------------------------------

// Wulff shape of (k h_M^p + l h_N^p)^{1/p} over the given normal set.
inline BodyPtr lp_combination_on(const BodyPtr& M, const BodyPtr& N, double k, double l, double p,
                                 const Mat& normals) {
    if (p == 0.0) throw Error("lp_combination needs p != 0");
    Vec h(normals.cols());
    for (int i = 0; i < normals.cols(); ++i) {
        Vec v = unitize(normals.col(i));
        double c = k * std::pow(support_eval(*M, v), p) + l * std::pow(support_eval(*N, v), p);
        if (!(c > 0.0) || !std::isfinite(c))
            throw NonPositiveCombination("combination k h_M^p + l h_N^p not positive at a normal");
        h(i) = std::pow(c, 1.0 / p);
    }
    return make_polytope(wulff_shape(normals, h).poly, "lp-combination");
}

// Combination on the natural normal set: exact ball arithmetic when both
// inputs are balls, otherwise the union of the polytopal normal sets.
inline BodyPtr lp_combination(const BodyPtr& M, const BodyPtr& N, double k, double l, double p) {
    if (p == 0.0) throw Error("lp_combination needs p != 0");
    if (!M->convex || !N->convex) throw NonConvexBody("lp_combination needs convex bodies");
    const auto* ballM = std::get_if<BallData>(&M->rep);
    const auto* ballN = std::get_if<BallData>(&N->rep);
    if (ballM && ballN) {
        double c = k * std::pow(ballM->radius, p) + l * std::pow(ballN->radius, p);
        if (!(c > 0.0)) throw NonPositiveCombination("ball combination not positive");
        return make_ball(std::pow(c, 1.0 / p), M->n);
    }
    const Polytope* pm = as_polytope(*M);
    const Polytope* pn = as_polytope(*N);
    if (!pm && !pn)
        throw Error("lp_combination of smooth non-ball bodies needs an explicit normal set");
    std::vector<Vec> dirs;
    auto add = [&](const Mat& cols) {
        for (int i = 0; i < cols.cols(); ++i) {
            Vec v = cols.col(i);
            bool dup = false;
            for (const Vec& w : dirs)
                if (nearly_parallel(v, w)) { dup = true; break; }
            if (!dup) dirs.push_back(v);
        }
    };
    if (pm) add(pm->normals);
    if (pn) add(pn->normals);
    Mat nm(M->n, static_cast<int>(dirs.size()));
    for (size_t i = 0; i < dirs.size(); ++i) nm.col(static_cast<int>(i)) = dirs[i];
    return lp_combination_on(M, N, k, l, p, nm);
}

}  // namespace quermass
