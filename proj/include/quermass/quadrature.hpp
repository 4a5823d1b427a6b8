#pragma once

// Quadrature on S^{n-1}. Deterministic schemes: uniform angles (n=2),
// Gauss-Legendre x uniform product (n=3), and cone-partitioned grids
// aligned with polytope cone boundaries: the integrands used downstream
// are smooth inside each cone, so boundary-aligned nodes recover near
// machine precision where a blind grid would stall at low order.
// n >= 4 falls back to seeded Monte Carlo.

#include "quermass/common.hpp"
#include "quermass/polytope.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <thread>

namespace quermass {

enum class GridScheme { UniformAngle, ProductGauss, MonteCarlo, ConePartitioned };

inline const char* scheme_name(GridScheme s) {
    switch (s) {
        case GridScheme::UniformAngle: return "uniform-angle";
        case GridScheme::ProductGauss: return "product-gauss";
        case GridScheme::MonteCarlo: return "mc";
        default: return "cone-partitioned";
    }
}

struct SphericalGrid {
    int dim = 0;
    GridScheme scheme = GridScheme::UniformAngle;
    Mat nodes;    // n x N, unit columns
    Vec weights;  // N, positive, summing to the sphere area
    std::vector<int> cone;  // per-node facet of the owner polytope (cone-partitioned only)
    std::uint64_t seed = 0;
    int resolution = 0;
    double err_hint = 1e-12;  // crude per-integral relative error guess

    int node_count() const { return static_cast<int>(weights.size()); }
};

// ---- Gauss-Legendre --------------------------------------------------

// Nodes/weights on [-1,1], cached per order.
inline const std::pair<Vec, Vec>& gauss_legendre(int k) {
    static std::map<int, std::pair<Vec, Vec>> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    Vec x(k), w(k);
    for (int i = 0; i < k; ++i) {
        double t = std::cos(kPi * (i + 0.75) / (k + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = k * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        double p0 = 1.0, p1 = t;
        for (int j = 2; j <= k; ++j) {
            double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = k * (t * p1 - p0) / (t * t - 1.0);
        x(k - 1 - i) = t;
        w(k - 1 - i) = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    return cache.emplace(k, std::make_pair(std::move(x), std::move(w))).first->second;
}

// ---- plain grids ------------------------------------------------------

inline SphericalGrid build_grid(int n, int resolution, GridScheme scheme, std::uint64_t seed = 0) {
    if (resolution < 1) throw Error("grid resolution must be positive");
    SphericalGrid g;
    g.dim = n;
    g.scheme = scheme;
    g.seed = seed;
    g.resolution = resolution;
    if (scheme == GridScheme::UniformAngle) {
        if (n != 2) throw UnsupportedScheme("uniform-angle grid is n=2 only");
        g.nodes.resize(2, resolution);
        g.weights = Vec::Constant(resolution, 2.0 * kPi / resolution);
        for (int k = 0; k < resolution; ++k) {
            double th = 2.0 * kPi * k / resolution;
            g.nodes(0, k) = std::cos(th);
            g.nodes(1, k) = std::sin(th);
        }
        g.err_hint = 1e-12;
        return g;
    }
    if (scheme == GridScheme::ProductGauss) {
        if (n != 3) throw UnsupportedScheme("product-gauss grid is n=3 only");
        const auto& [gx, gw] = gauss_legendre(resolution);
        int nphi = 2 * resolution;
        g.nodes.resize(3, resolution * nphi);
        g.weights.resize(resolution * nphi);
        int idx = 0;
        for (int i = 0; i < resolution; ++i) {
            double z = gx(i);
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            for (int k = 0; k < nphi; ++k) {
                double phi = 2.0 * kPi * (k + 0.5) / nphi;
                g.nodes(0, idx) = r * std::cos(phi);
                g.nodes(1, idx) = r * std::sin(phi);
                g.nodes(2, idx) = z;
                g.weights(idx) = gw(i) * 2.0 * kPi / nphi;
                ++idx;
            }
        }
        g.err_hint = 1e-11;
        return g;
    }
    if (scheme == GridScheme::MonteCarlo) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        g.nodes.resize(n, resolution);
        for (int k = 0; k < resolution; ++k) {
            Vec v(n);
            do {
                for (int i = 0; i < n; ++i) v(i) = gauss(rng);
            } while (v.norm() < 1e-12);
            g.nodes.col(k) = v / v.norm();
        }
        g.weights = Vec::Constant(resolution, sphere_surface_area(n) / resolution);
        g.err_hint = 1.0 / std::sqrt(static_cast<double>(resolution));
        return g;
    }
    throw UnsupportedScheme("cone-partitioned grids are built from a polytope");
}

// ---- cone-partitioned, n = 2 ------------------------------------------

namespace detail {

inline SphericalGrid arc_grid(const std::vector<const Polytope*>& polys, int nodes_per_arc) {
    std::vector<double> breaks;
    for (const Polytope* P : polys)
        for (int k = 0; k < P->vertex_count(); ++k)
            breaks.push_back(std::atan2(P->vertices(1, k), P->vertices(0, k)));
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                 breaks.end());
    if (breaks.size() > 1 && std::abs(breaks.back() - 2.0 * kPi - breaks.front()) < 1e-13)
        breaks.pop_back();

    const auto& [gx, gw] = gauss_legendre(nodes_per_arc);
    const double max_piece = kPi / 8.0;

    std::vector<double> thetas, ws;
    const size_t K = breaks.size();
    for (size_t k = 0; k < K; ++k) {
        double lo = breaks[k];
        double hi = (k + 1 < K) ? breaks[k + 1] : breaks[0] + 2.0 * kPi;
        double width = hi - lo;
        // wide arcs split so the per-piece Gauss rule stays in its
        // fast-convergence regime
        int pieces = std::max(1, static_cast<int>(std::ceil(width / max_piece)));
        for (int s = 0; s < pieces; ++s) {
            double a = lo + width * s / pieces;
            double b = lo + width * (s + 1) / pieces;
            double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            for (int i = 0; i < nodes_per_arc; ++i) {
                thetas.push_back(mid + half * gx(i));
                ws.push_back(half * gw(i));
            }
        }
    }

    SphericalGrid g;
    g.dim = 2;
    g.scheme = GridScheme::ConePartitioned;
    g.resolution = nodes_per_arc;
    g.nodes.resize(2, static_cast<int>(thetas.size()));
    g.weights.resize(static_cast<int>(thetas.size()));
    g.cone.resize(thetas.size());
    for (size_t i = 0; i < thetas.size(); ++i) {
        Vec u(2);
        u << std::cos(thetas[i]), std::sin(thetas[i]);
        g.nodes.col(static_cast<int>(i)) = u;
        g.weights(static_cast<int>(i)) = ws[i];
        g.cone[i] = radial_gauss(*polys[0], u);
    }
    g.err_hint = 1e-13;
    return g;
}

// ---- cone-partitioned, n = 3 ------------------------------------------

// degree-5 rule on the reference triangle, barycentric, weights sum to 1
struct TriangleRule {
    std::array<std::array<double, 3>, 7> bary;
    std::array<double, 7> w;
};

inline const TriangleRule& triangle_rule() {
    static const TriangleRule rule = [] {
        TriangleRule r{};
        const double s15 = std::sqrt(15.0);
        const double a = (6.0 + s15) / 21.0, b = (6.0 - s15) / 21.0;
        const double wa = (155.0 + s15) / 1200.0, wb = (155.0 - s15) / 1200.0;
        r.bary[0] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
        r.w[0] = 9.0 / 40.0;
        r.bary[1] = {a, a, 1 - 2 * a};
        r.bary[2] = {a, 1 - 2 * a, a};
        r.bary[3] = {1 - 2 * a, a, a};
        r.w[1] = r.w[2] = r.w[3] = wa;
        r.bary[4] = {b, b, 1 - 2 * b};
        r.bary[5] = {b, 1 - 2 * b, b};
        r.bary[6] = {1 - 2 * b, b, b};
        r.w[4] = r.w[5] = r.w[6] = wb;
        return r;
    }();
    return rule;
}

using Tri = std::array<Eigen::Vector3d, 3>;

// Solid angle of the cone over a (possibly non-unit) flat triangle.
inline double solid_angle(const Tri& t) {
    double la = t[0].norm(), lb = t[1].norm(), lc = t[2].norm();
    double det = t[0].dot(t[1].cross(t[2]));
    double den = la * lb * lc + t[0].dot(t[1]) * lc + t[1].dot(t[2]) * la + t[2].dot(t[0]) * lb;
    return std::abs(2.0 * std::atan2(std::abs(det), den));
}

// Split a flat triangle by a plane through the origin; both sides kept.
inline std::vector<Tri> clip_triangle(const Tri& t, const Eigen::Vector3d& w) {
    std::array<double, 3> d{w.dot(t[0]), w.dot(t[1]), w.dot(t[2])};
    double mx = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
    double eps = 1e-13 * std::max(1.0, mx);
    bool pos = d[0] > eps || d[1] > eps || d[2] > eps;
    bool neg = d[0] < -eps || d[1] < -eps || d[2] < -eps;
    if (!pos || !neg) return {t};
    std::vector<Eigen::Vector3d> up, dn;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d& a = t[i];
        const Eigen::Vector3d& b = t[(i + 1) % 3];
        double da = d[i], db = d[(i + 1) % 3];
        if (da >= -eps) up.push_back(a);
        if (da <= eps) dn.push_back(a);
        if ((da > eps && db < -eps) || (da < -eps && db > eps)) {
            Eigen::Vector3d cut = a + (da / (da - db)) * (b - a);
            up.push_back(cut);
            dn.push_back(cut);
        }
    }
    std::vector<Tri> out;
    auto fan = [&](const std::vector<Eigen::Vector3d>& poly) {
        for (size_t k = 1; k + 1 < poly.size(); ++k) out.push_back({poly[0], poly[k], poly[k + 1]});
    };
    fan(up);
    fan(dn);
    return out;
}

inline bool triangle_contains_dir(const Tri& t, const Eigen::Vector3d& d) {
    double s0 = t[0].cross(t[1]).dot(d);
    double s1 = t[1].cross(t[2]).dot(d);
    double s2 = t[2].cross(t[0]).dot(d);
    double tol = 1e-12;
    return (s0 >= -tol && s1 >= -tol && s2 >= -tol) || (s0 <= tol && s1 <= tol && s2 <= tol);
}

struct ConeGridBuilder {
    std::vector<const Polytope*> polys;
    std::vector<Eigen::Vector3d> flagged;  // directions that force refinement
    int base_level = 3;
    double diam_target = std::pow(2.0, -5.0);
    int max_level = 7;

    std::vector<Eigen::Vector3d> nodes;
    std::vector<double> weights;

    void emit(const Tri& t) {
        double area = solid_angle(t);
        if (!(area > 1e-16)) return;
        Eigen::Vector3d e1 = t[1] - t[0], e2 = t[2] - t[0];
        Eigen::Vector3d nrm = e1.cross(e2);
        double flat2 = nrm.norm();
        if (!(flat2 > 1e-30)) return;
        Eigen::Vector3d nhat = nrm / flat2;
        if (nhat.dot(t[0] + t[1] + t[2]) < 0.0) nhat = -nhat;
        const TriangleRule& rule = triangle_rule();
        std::array<Eigen::Vector3d, 7> us;
        std::array<double, 7> ws;
        double sum = 0.0;
        for (int i = 0; i < 7; ++i) {
            Eigen::Vector3d x =
                rule.bary[i][0] * t[0] + rule.bary[i][1] * t[1] + rule.bary[i][2] * t[2];
            double r = x.norm();
            us[i] = x / r;
            ws[i] = rule.w[i] * (0.5 * flat2) * (x.dot(nhat) / (r * r * r));
            sum += ws[i];
        }
        double fix = area / sum;  // pin the leaf mass to the exact spherical area
        for (int i = 0; i < 7; ++i) {
            nodes.push_back(us[i]);
            weights.push_back(ws[i] * fix);
        }
    }

    bool straddles(const Tri& t) const {
        for (const Polytope* P : polys) {
            int a = radial_gauss(*P, t[0]);
            int b = radial_gauss(*P, t[1]);
            int c = radial_gauss(*P, t[2]);
            if (a != b || b != c) return true;
        }
        return false;
    }

    void leaf(const Tri& t) {
        // split straddling leaves exactly along the facet tie planes
        std::vector<Tri> pieces{t};
        for (const Polytope* P : polys) {
            std::array<int, 3> as{radial_gauss(*P, t[0]), radial_gauss(*P, t[1]),
                                  radial_gauss(*P, t[2])};
            for (int i = 0; i < 3; ++i) {
                for (int k = i + 1; k < 3; ++k) {
                    if (as[i] == as[k] || as[i] < 0 || as[k] < 0) continue;
                    Eigen::Vector3d tie = P->support(as[i]) * P->normals.col(as[k]) -
                                          P->support(as[k]) * P->normals.col(as[i]);
                    double len = tie.norm();
                    if (len < 1e-14) continue;
                    tie /= len;
                    std::vector<Tri> next;
                    for (const Tri& piece : pieces) {
                        auto cut = clip_triangle(piece, tie);
                        next.insert(next.end(), cut.begin(), cut.end());
                    }
                    pieces = std::move(next);
                }
            }
        }
        for (const Tri& piece : pieces) emit(piece);
    }

    void visit(const Tri& t, int depth) {
        double diam = std::max({(t[0] - t[1]).norm(), (t[1] - t[2]).norm(), (t[0] - t[2]).norm()});
        bool want = depth < base_level;
        if (!want && depth < max_level && diam > diam_target) {
            if (straddles(t)) {
                want = true;
            } else {
                for (const auto& d : flagged)
                    if (triangle_contains_dir(t, d)) { want = true; break; }
            }
        }
        if (!want) {
            leaf(t);
            return;
        }
        Eigen::Vector3d ab = (t[0] + t[1]).normalized();
        Eigen::Vector3d bc = (t[1] + t[2]).normalized();
        Eigen::Vector3d ca = (t[2] + t[0]).normalized();
        visit({t[0], ab, ca}, depth + 1);
        visit({ab, t[1], bc}, depth + 1);
        visit({ca, bc, t[2]}, depth + 1);
        visit({ab, bc, ca}, depth + 1);
    }
};

inline SphericalGrid sphere_tri_grid(const std::vector<const Polytope*>& polys, int base_level,
                                     int refine_exp, int max_level) {
    ConeGridBuilder b;
    b.polys = polys;
    b.base_level = base_level;
    b.diam_target = std::pow(2.0, -refine_exp);
    b.max_level = max_level;
    for (const Polytope* P : polys)
        for (int k = 0; k < P->vertex_count(); ++k)
            b.flagged.push_back(Eigen::Vector3d(P->vertices.col(k)).normalized());

    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> v = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0},
        {0, -1, phi}, {0, 1, phi}, {0, -1, -phi}, {0, 1, -phi},
        {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& p : v) p.normalize();
    const int faces[20][3] = {{0, 11, 5}, {0, 5, 1},   {0, 1, 7},  {0, 7, 10}, {0, 10, 11},
                              {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                              {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                              {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
    for (const auto& f : faces) {
        Tri t{v[f[0]], v[f[1]], v[f[2]]};
        b.visit(t, 0);
    }

    SphericalGrid g;
    g.dim = 3;
    g.scheme = GridScheme::ConePartitioned;
    g.resolution = base_level;
    g.nodes.resize(3, static_cast<int>(b.nodes.size()));
    g.weights.resize(static_cast<int>(b.nodes.size()));
    g.cone.resize(b.nodes.size());
    for (size_t i = 0; i < b.nodes.size(); ++i) {
        g.nodes.col(static_cast<int>(i)) = b.nodes[i];
        g.weights(static_cast<int>(i)) = b.weights[i];
        g.cone[i] = radial_gauss(*polys[0], b.nodes[i]);
    }
    g.err_hint = 1e-5;
    return g;
}

}  // namespace detail

// Cone-partitioned grid for one or two polytopes; node-to-cone indices
// refer to the first one.
inline SphericalGrid cone_partitioned_grid(const std::vector<const Polytope*>& polys,
                                           int resolution) {
    if (polys.empty() || !polys[0]) throw Error("cone_partitioned_grid needs a polytope");
    int n = polys[0]->dim();
    if (n == 2) return detail::arc_grid(polys, resolution);
    if (n == 3) {
        int base = resolution >= 64 ? 4 : (resolution >= 24 ? 3 : 2);
        int refine = resolution >= 64 ? 6 : (resolution >= 16 ? 5 : 4);
        int cap = resolution >= 16 ? 7 : 6;
        return detail::sphere_tri_grid(polys, base, refine, cap);
    }
    throw UnsupportedDimension("cone-partitioned grids are for n=2,3");
}

inline SphericalGrid cone_partitioned_grid(const Polytope& P, int resolution) {
    return cone_partitioned_grid(std::vector<const Polytope*>{&P}, resolution);
}

// ---- integration -------------------------------------------------------

// Evaluate-parallel, reduce-serial: worker threads fill fixed node
// slots, the weighted reduction runs in index order, so the result is
// bit-identical for any thread count. The integrand receives the node
// index alongside the direction (cone caches are per-index).
template <typename F>
double integrate_indexed(const SphericalGrid& g, F&& f, int threads = 1) {
    const int N = g.node_count();
    std::vector<double> vals(static_cast<size_t>(N));
    auto run = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) vals[static_cast<size_t>(i)] = f(i, Vec(g.nodes.col(i)));
    };
    if (threads <= 1 || N < 256) {
        run(0, N);
    } else {
        int nt = std::min<int>(threads, std::max(1u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        int chunk = (N + nt - 1) / nt;
        for (int t = 0; t < nt; ++t) {
            int lo = t * chunk, hi = std::min(N, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(run, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    KahanSum acc;
    for (int i = 0; i < N; ++i) {
        double v = vals[static_cast<size_t>(i)];
        if (!std::isfinite(v))
            throw NonFiniteIntegrand("non-finite integrand at node " + std::to_string(i));
        acc.add(g.weights(i) * v);
    }
    return acc.value();
}

template <typename F>
double integrate(const SphericalGrid& g, F&& f, int threads = 1) {
    return integrate_indexed(g, [&](int, const Vec& u) { return f(u); }, threads);
}

}  // namespace quermass
