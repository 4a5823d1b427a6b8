#pragma once

// Seeded random bodies for fuzz campaigns and round-trip fixtures.
// Generated polytopes are rejected until the normals clear the
// hemisphere condition with a real margin and no two normals nearly
// coincide, so downstream tolerances are not at the mercy of freak
// degenerate samples.

#include "quermass/body.hpp"

#include <random>

namespace quermass {

class BodyGenerator {
public:
    BodyGenerator(std::uint64_t seed, int n, bool symmetric = false)
        : rng_(seed), n_(n), symmetric_(symmetric) {}

    double uniform(double a, double b) {
        std::uniform_real_distribution<double> d(a, b);
        return d(rng_);
    }

    int uniform_int(int a, int b) {
        std::uniform_int_distribution<int> d(a, b);
        return d(rng_);
    }

    Vec random_unit() {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vec v(n_);
        do {
            for (int i = 0; i < n_; ++i) v(i) = gauss(rng_);
        } while (v.norm() < 1e-8);
        return v / v.norm();
    }

    // Random rotation via QR of a Gaussian matrix.
    Mat random_rotation() {
        std::normal_distribution<double> gauss(0.0, 1.0);
        Mat A(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) A(i, k) = gauss(rng_);
        Eigen::HouseholderQR<Mat> qr(A);
        Mat Q = qr.householderQ();
        if (Q.determinant() < 0) Q.col(0) *= -1.0;
        return Q;
    }

    // Invertible map with singular values in [0.5, 2].
    Mat random_linear_map() {
        Mat Q1 = random_rotation(), Q2 = random_rotation();
        Vec s(n_);
        for (int i = 0; i < n_; ++i) s(i) = uniform(0.5, 2.0);
        return Q1 * s.asDiagonal() * Q2.transpose();
    }

    Polytope random_polytope(int m_min = -1, int m_max = 20) {
        if (m_min < 0) m_min = n_ + 1;
        const double min_sep = 0.12;       // radians between any two normals
        const double min_margin = 0.15;    // hemisphere margin
        for (int attempt = 0; attempt < 400; ++attempt) {
            int m = uniform_int(m_min, m_max);
            if (symmetric_ && m % 2) ++m;
            std::vector<Vec> dirs;
            int want = symmetric_ ? m / 2 : m;
            bool ok = true;
            for (int i = 0; i < want && ok; ++i) {
                // resample just this direction until it clears the others
                int tries = 0;
                while (true) {
                    Vec v = random_unit();
                    bool clear = true;
                    for (const Vec& w : dirs) {
                        if (std::abs(v.dot(w)) > std::cos(min_sep)) { clear = false; break; }
                    }
                    if (clear) {
                        dirs.push_back(v);
                        if (symmetric_) dirs.push_back(-v);
                        break;
                    }
                    if (++tries > 200) { ok = false; break; }
                }
            }
            if (!ok || static_cast<int>(dirs.size()) < n_ + 1) continue;
            Mat nm(n_, static_cast<int>(dirs.size()));
            Vec h(static_cast<int>(dirs.size()));
            for (size_t i = 0; i < dirs.size(); ++i) nm.col(static_cast<int>(i)) = dirs[i];
            if (symmetric_) {
                for (int i = 0; i < h.size(); i += 2) h(i) = h(i + 1) = uniform(0.3, 3.0);
            } else {
                for (int i = 0; i < h.size(); ++i) h(i) = uniform(0.3, 3.0);
            }
            if (hemisphere_margin(nm) < min_margin) continue;
            try {
                WulffResult w = wulff_shape(nm, h);
                if (w.poly.facet_count() < n_ + 1) continue;
                return w.poly;
            } catch (const Error&) {
                continue;
            }
        }
        throw Error("random_polytope: rejection sampling did not terminate");
    }

    BodyPtr random_ellipsoid() {
        Vec a(n_);
        for (int i = 0; i < n_; ++i) a(i) = uniform(0.4, 2.5);
        return make_ellipsoid(a);
    }

    // Convex body from the configured families: H-polytope, ellipsoid,
    // or a linear image of the ball.
    BodyPtr random_convex(int m_max = 20) {
        double pick = uniform(0.0, 1.0);
        if (pick < 0.5) return make_polytope(random_polytope(n_ + 1, m_max));
        if (pick < 0.75) return random_ellipsoid();
        return apply_linear(make_ball(uniform(0.5, 1.5), n_), random_linear_map());
    }

    BodyPtr random_star() {
        double pick = uniform(0.0, 1.0);
        if (pick < 0.6) return random_convex();
        if (pick < 0.8) return star_union(random_ellipsoid(), random_ellipsoid());
        return star_intersection(random_ellipsoid(), random_ellipsoid());
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    int n_;
    bool symmetric_;
};

}  // namespace quermass
