#pragma once

// Shared basics: vector aliases, sphere constants, error types,
// compensated summation.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace quermass {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
    return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

// Surface area of S^{n-1} (= n * omega_n).
inline double sphere_surface_area(int n) { return n * unit_ball_volume(n); }

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct NonConvexBody : Error { using Error::Error; };
struct DegenerateBody : Error { using Error::Error; };
struct ZeroVector : Error { using Error::Error; };
struct UnboundedWulffShape : Error { using Error::Error; };
struct NonPositiveCombination : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };
struct UnsupportedScheme : Error { using Error::Error; };
struct UnsupportedDimension : Error { using Error::Error; };
struct NonFiniteIntegrand : Error { using Error::Error; };
struct NonFiniteObjective : Error { using Error::Error; };
struct NotEvenMeasure : Error { using Error::Error; };
struct ConcentratedMeasure : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

// Neumaier-compensated accumulator. Summation order is the caller's
// responsibility; fixed order makes reductions deterministic.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Unit-normalize, rejecting near-zero input.
inline Vec unitize(const Vec& x) {
    double r = x.norm();
    if (!(r > 1e-300) || !x.allFinite())
        throw ZeroVector("cannot normalize zero or non-finite vector");
    return x / r;
}

inline bool nearly_parallel(const Vec& a, const Vec& b, double tol = 1e-10) {
    return a.dot(b) > 1.0 - tol;
}

}  // namespace quermass
