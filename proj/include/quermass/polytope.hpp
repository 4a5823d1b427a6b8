#pragma once

// H-polytopes built as Wulff shapes (halfspace intersections with the
// origin interior), carrying both representations: facet normals with
// support numbers, and the vertex set with facet-vertex incidence.
// Construction enumerates candidate vertices from n-subsets of facets;
// for the small facet counts used here (m <= ~40) this is simpler and
// more robust than incremental intersection.

#include "quermass/common.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

namespace quermass {

struct Polytope {
    Mat normals;   // n x m, unit columns
    Vec support;   // m entries, all > 0
    Mat vertices;  // n x K
    // Vertex indices per facet. n=2: the two edge endpoints.
    // n=3: an ordered cycle, counterclockwise seen from outside.
    std::vector<std::vector<int>> facet_vertices;

    int dim() const { return static_cast<int>(normals.rows()); }
    int facet_count() const { return static_cast<int>(normals.cols()); }
    int vertex_count() const { return static_cast<int>(vertices.cols()); }
    double scale() const { return support.maxCoeff(); }
};

// --------------------------------------------------------------------
// Hemisphere certificate.
//
// The normals avoid every closed hemisphere iff the origin lies in the
// interior of their convex hull. The returned margin is the minimal
// signed distance from the origin to a supporting hyperplane of that
// hull; the hull is full-dimensional with the origin strictly inside
// iff the margin is positive. Supporting hyperplanes are enumerated
// from n-subsets of the normals, which covers every facet plane.

namespace detail {

// Normal of the hyperplane spanned by the columns of pts (n points in
// R^n); empty result if the points are affinely dependent.
inline std::optional<Vec> hyperplane_normal(const Mat& pts) {
    const int n = static_cast<int>(pts.rows());
    if (n == 2) {
        Vec d = pts.col(1) - pts.col(0);
        double len = d.norm();
        if (len < 1e-12) return std::nullopt;
        Vec w(2);
        w << -d(1), d(0);
        return Vec(w / len);
    }
    if (n == 3) {
        Eigen::Vector3d a = pts.col(1) - pts.col(0);
        Eigen::Vector3d b = pts.col(2) - pts.col(0);
        Eigen::Vector3d w = a.cross(b);
        double len = w.norm();
        if (len < 1e-12 * std::max(1.0, a.norm() * b.norm())) return std::nullopt;
        return Vec(w / len);
    }
    Mat diffs(n - 1, n);
    for (int i = 0; i + 1 < n; ++i) diffs.row(i) = (pts.col(i + 1) - pts.col(0)).transpose();
    Eigen::JacobiSVD<Mat> svd(diffs, Eigen::ComputeFullV);
    if (svd.singularValues()(n - 2) < 1e-10) return std::nullopt;
    return Vec(svd.matrixV().col(n - 1));
}

// Visit all k-subsets of {0,...,m-1} in lexicographic order.
template <typename F>
void for_each_subset(int m, int k, F&& fn) {
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    if (k > m) return;
    while (true) {
        fn(idx);
        int pos = k - 1;
        while (pos >= 0 && idx[pos] == m - k + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

inline double hemisphere_margin(const Mat& normals) {
    const int n = static_cast<int>(normals.rows());
    const int m = static_cast<int>(normals.cols());
    if (m < n + 1) return -1.0;

    // Normals confined to a proper subspace always fit a closed hemisphere.
    Eigen::JacobiSVD<Mat> svd(normals);
    if (svd.singularValues()(n - 1) < 1e-9) return 0.0;

    double margin = std::numeric_limits<double>::infinity();
    bool found = false;
    Mat pts(n, n);
    detail::for_each_subset(m, n, [&](const std::vector<int>& idx) {
        for (int s = 0; s < n; ++s) pts.col(s) = normals.col(idx[s]);
        auto w = detail::hyperplane_normal(pts);
        if (!w) return;
        double d = w->dot(pts.col(0));
        for (int sign = 0; sign < 2; ++sign) {
            Vec u = (sign == 0) ? *w : Vec(-*w);
            double off = (sign == 0) ? d : -d;
            bool supporting = true;
            for (int k = 0; k < m; ++k) {
                if (u.dot(normals.col(k)) > off + 1e-12) { supporting = false; break; }
            }
            if (supporting) {
                margin = std::min(margin, off);
                found = true;
            }
        }
    });
    return found ? margin : -1.0;
}

// --------------------------------------------------------------------
// Wulff shape construction.

struct WulffResult {
    Polytope poly;
    std::vector<int> kept;    // output facet -> input index
    std::vector<int> pruned;  // input indices with empty cones
};

namespace detail {

// Order a facet's vertices as a cycle around the facet normal,
// counterclockwise seen from outside (n=3 only).
inline void order_facet_cycle(const Mat& verts, const Vec& normal, std::vector<int>& cycle) {
    if (cycle.size() < 3) return;
    Vec c = Vec::Zero(3);
    for (int k : cycle) c += verts.col(k);
    c /= static_cast<double>(cycle.size());
    // in-plane frame
    Vec a = verts.col(cycle[0]) - c;
    a -= normal * normal.dot(a);
    double an = a.norm();
    if (an < 1e-300) return;
    a /= an;
    Eigen::Vector3d nb = Eigen::Vector3d(normal).cross(Eigen::Vector3d(a));
    std::sort(cycle.begin(), cycle.end(), [&](int i, int j) {
        Vec di = verts.col(i) - c, dj = verts.col(j) - c;
        double ti = std::atan2(nb.dot(di), a.dot(di));
        double tj = std::atan2(nb.dot(dj), a.dot(dj));
        if (ti != tj) return ti < tj;
        return i < j;
    });
}

inline double polygon_area(const Mat& verts, const std::vector<int>& cycle) {
    if (cycle.size() < 3) return 0.0;
    Eigen::Vector3d acc = Eigen::Vector3d::Zero();
    Eigen::Vector3d base = verts.col(cycle[0]);
    for (size_t k = 1; k + 1 < cycle.size(); ++k) {
        Eigen::Vector3d a = Eigen::Vector3d(verts.col(cycle[k])) - base;
        Eigen::Vector3d b = Eigen::Vector3d(verts.col(cycle[k + 1])) - base;
        acc += a.cross(b);
    }
    return 0.5 * acc.norm();
}

}  // namespace detail

inline WulffResult wulff_shape(Mat normals, Vec h) {
    const int n = static_cast<int>(normals.rows());
    const int m = static_cast<int>(normals.cols());
    if (n < 2) throw UnsupportedDimension("dimension must be >= 2");
    if (h.size() != m) throw Error("normals/support size mismatch");
    for (int i = 0; i < m; ++i) {
        if (!(h(i) > 0.0) || !std::isfinite(h(i)))
            throw DegenerateBody("support numbers must be positive and finite");
        normals.col(i) = unitize(normals.col(i));
    }

    // Exact-duplicate directions: only the tightest halfspace can matter.
    std::vector<int> kept_in, pruned;
    std::vector<char> dup(m, 0);
    for (int i = 0; i < m; ++i) {
        if (dup[i]) continue;
        for (int k = i + 1; k < m; ++k) {
            if (dup[k]) continue;
            if (nearly_parallel(normals.col(i), normals.col(k))) {
                if (h(k) < h(i)) { dup[i] = 1; break; }
                dup[k] = 1;
            }
        }
    }
    Mat nm(n, m);
    Vec hv(m);
    int mm = 0;
    for (int i = 0; i < m; ++i) {
        if (dup[i]) { pruned.push_back(i); continue; }
        nm.col(mm) = normals.col(i);
        hv(mm) = h(i);
        kept_in.push_back(i);
        ++mm;
    }
    nm.conservativeResize(n, mm);
    hv.conservativeResize(mm);

    if (hemisphere_margin(nm) <= 1e-9)
        throw UnboundedWulffShape("normals lie in a closed hemisphere");

    const double hmax = hv.maxCoeff();
    const double feas_tol = 1e-9 * hmax;
    const double dedup_tol = 1e-8 * hmax;

    // Candidate vertices from n-subsets of facet planes.
    std::vector<Vec> verts;
    Mat A(n, n);
    Vec b(n);
    detail::for_each_subset(mm, n, [&](const std::vector<int>& idx) {
        for (int s = 0; s < n; ++s) {
            A.row(s) = nm.col(idx[s]).transpose();
            b(s) = hv(idx[s]);
        }
        Eigen::FullPivLU<Mat> lu(A);
        if (!lu.isInvertible()) return;
        Vec x = lu.solve(b);
        if (!x.allFinite()) return;
        double tol = feas_tol + 1e-12 * x.norm();
        for (int k = 0; k < mm; ++k) {
            if (x.dot(nm.col(k)) > hv(k) + tol) return;
        }
        for (const Vec& w : verts) {
            if ((w - x).norm() <= dedup_tol) return;
        }
        verts.push_back(x);
    });

    if (verts.size() < static_cast<size_t>(n + 1))
        throw UnboundedWulffShape("halfspace intersection has no full-dimensional vertex set");

    Mat V(n, static_cast<int>(verts.size()));
    for (size_t k = 0; k < verts.size(); ++k) V.col(static_cast<int>(k)) = verts[k];

    // Incidence, then prune facets whose contact set is below dimension n-1.
    const double inc_tol = 1e-8 * hmax;
    std::vector<std::vector<int>> inc(mm);
    for (int i = 0; i < mm; ++i) {
        for (int k = 0; k < V.cols(); ++k) {
            double g = V.col(k).dot(nm.col(i)) - hv(i);
            if (g > -(inc_tol + 1e-11 * V.col(k).norm())) inc[i].push_back(k);
        }
    }

    std::vector<int> kept_out;
    for (int i = 0; i < mm; ++i) {
        bool alive = false;
        if (n == 2) {
            for (size_t a = 0; a < inc[i].size() && !alive; ++a)
                for (size_t c = a + 1; c < inc[i].size() && !alive; ++c)
                    if ((V.col(inc[i][a]) - V.col(inc[i][c])).norm() > 1e-10 * hmax) alive = true;
        } else if (n == 3) {
            detail::order_facet_cycle(V, nm.col(i), inc[i]);
            alive = detail::polygon_area(V, inc[i]) > 1e-13 * hmax * hmax;
        } else {
            alive = inc[i].size() >= static_cast<size_t>(n);
        }
        if (alive)
            kept_out.push_back(i);
        else
            pruned.push_back(kept_in[i]);
    }

    WulffResult out;
    out.poly.normals.resize(n, static_cast<int>(kept_out.size()));
    out.poly.support.resize(static_cast<int>(kept_out.size()));
    for (size_t i = 0; i < kept_out.size(); ++i) {
        out.poly.normals.col(static_cast<int>(i)) = nm.col(kept_out[i]);
        out.poly.support(static_cast<int>(i)) = hv(kept_out[i]);
        out.poly.facet_vertices.push_back(inc[kept_out[i]]);
        out.kept.push_back(kept_in[kept_out[i]]);
    }
    out.poly.vertices = V;
    out.pruned = pruned;
    std::sort(out.pruned.begin(), out.pruned.end());
    if (out.poly.facet_count() < n + 1)
        throw UnboundedWulffShape("fewer than n+1 facets survive");
    return out;
}

// --------------------------------------------------------------------
// Evaluation.

inline double polytope_radial(const Polytope& P, const Vec& x) {
    double r = x.norm();
    if (!(r > 1e-300)) throw ZeroVector("radial function needs a nonzero direction");
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < P.facet_count(); ++i) {
        double d = x.dot(P.normals.col(i));
        if (d > 0.0) best = std::min(best, P.support(i) / d);
    }
    return best;
}

inline double polytope_support(const Polytope& P, const Vec& x) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < P.vertex_count(); ++k) best = std::max(best, x.dot(P.vertices.col(k)));
    return best;
}

// Radial Gauss map: facet hit by the ray through u. Ties on cone
// boundaries go to the lowest facet index.
inline int radial_gauss(const Polytope& P, const Vec& u) {
    double best = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (int i = 0; i < P.facet_count(); ++i) {
        double d = u.dot(P.normals.col(i));
        if (d <= 0.0) continue;
        double t = P.support(i) / d;
        if (t < best) { best = t; arg = i; }
    }
    return arg;
}

// --------------------------------------------------------------------
// Dual representation swaps and linear images.

inline Polytope polar_polytope(const Polytope& P) {
    const int n = P.dim();
    Polytope Q;
    Q.normals.resize(n, P.vertex_count());
    Q.support.resize(P.vertex_count());
    for (int k = 0; k < P.vertex_count(); ++k) {
        double len = P.vertices.col(k).norm();
        if (!(len > 1e-300)) throw DegenerateBody("polar of polytope with vertex at origin");
        Q.normals.col(k) = P.vertices.col(k) / len;
        Q.support(k) = 1.0 / len;
    }
    Q.vertices.resize(n, P.facet_count());
    for (int i = 0; i < P.facet_count(); ++i)
        Q.vertices.col(i) = P.normals.col(i) / P.support(i);
    Q.facet_vertices.assign(P.vertex_count(), {});
    for (int i = 0; i < P.facet_count(); ++i)
        for (int k : P.facet_vertices[i]) Q.facet_vertices[k].push_back(i);
    if (n == 3)
        for (int k = 0; k < Q.facet_count(); ++k)
            detail::order_facet_cycle(Q.vertices, Q.normals.col(k), Q.facet_vertices[k]);
    return Q;
}

// Convex hull of points with the origin interior, via polar duality.
// Returns the hull polytope and the indices of inputs that are vertices.
inline WulffResult convex_hull(const Mat& points) {
    const int m = static_cast<int>(points.cols());
    Mat dirs(points.rows(), m);
    Vec off(m);
    for (int k = 0; k < m; ++k) {
        double len = points.col(k).norm();
        if (!(len > 1e-300)) throw DegenerateBody("hull point at the origin");
        dirs.col(k) = points.col(k) / len;
        off(k) = 1.0 / len;
    }
    WulffResult dual = wulff_shape(dirs, off);
    WulffResult out;
    out.poly = polar_polytope(dual.poly);
    out.kept = dual.kept;
    out.pruned = dual.pruned;
    return out;
}

inline Polytope linear_image(const Polytope& P, const Mat& map) {
    const int n = P.dim();
    Eigen::FullPivLU<Mat> lu(map);
    if (!lu.isInvertible()) throw SingularMatrix("linear image needs an invertible matrix");
    Mat invT = lu.inverse().transpose();
    Polytope Q;
    Q.normals.resize(n, P.facet_count());
    Q.support.resize(P.facet_count());
    for (int i = 0; i < P.facet_count(); ++i) {
        Vec g = invT * P.normals.col(i);
        double len = g.norm();
        Q.normals.col(i) = g / len;
        Q.support(i) = P.support(i) / len;
    }
    Q.vertices = map * P.vertices;
    Q.facet_vertices = P.facet_vertices;
    if (n == 3)
        for (int i = 0; i < Q.facet_count(); ++i)
            detail::order_facet_cycle(Q.vertices, Q.normals.col(i), Q.facet_vertices[i]);
    return Q;
}

inline Polytope scale_polytope(const Polytope& P, double lambda) {
    Polytope Q = P;
    Q.support *= lambda;
    Q.vertices *= lambda;
    return Q;
}

// --------------------------------------------------------------------
// Metric quantities.

inline double facet_area(const Polytope& P, int i) {
    const auto& fv = P.facet_vertices[i];
    if (P.dim() == 2) {
        double best = 0.0;
        for (size_t a = 0; a < fv.size(); ++a)
            for (size_t b = a + 1; b < fv.size(); ++b)
                best = std::max(best, (P.vertices.col(fv[a]) - P.vertices.col(fv[b])).norm());
        return best;
    }
    if (P.dim() == 3) return detail::polygon_area(P.vertices, fv);
    throw UnsupportedDimension("facet areas only for n=2,3");
}

inline double polytope_volume(const Polytope& P) {
    double v = 0.0;
    for (int i = 0; i < P.facet_count(); ++i) v += P.support(i) * facet_area(P, i);
    return v / P.dim();
}

// Sorted cone-boundary angles and the facet owning each arc (n=2).
struct ArcPartition {
    std::vector<double> breaks;  // vertex angles, ascending in (-pi, pi]
    std::vector<int> facet;      // facet of arc [breaks[k], breaks[k+1])
};

inline ArcPartition cone_arcs(const Polytope& P) {
    if (P.dim() != 2) throw UnsupportedDimension("cone_arcs is n=2 only");
    ArcPartition part;
    for (int k = 0; k < P.vertex_count(); ++k)
        part.breaks.push_back(std::atan2(P.vertices(1, k), P.vertices(0, k)));
    std::sort(part.breaks.begin(), part.breaks.end());
    const size_t K = part.breaks.size();
    for (size_t k = 0; k < K; ++k) {
        double lo = part.breaks[k];
        double hi = (k + 1 < K) ? part.breaks[k + 1] : part.breaks[0] + 2.0 * kPi;
        double mid = 0.5 * (lo + hi);
        Vec u(2);
        u << std::cos(mid), std::sin(mid);
        part.facet.push_back(radial_gauss(P, u));
    }
    return part;
}

}  // namespace quermass
