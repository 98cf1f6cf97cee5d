#include "crem/phases.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace crem {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kHalfSqrt2 = std::sqrt(0.5);

double limit_b1(double s, double u) { return 1.0 + 0.5 * (s * s - u * u); }
double limit_b2(double s, double /*u*/) { return kSqrt2 * s; }
double limit_b3(double s, double u) { (void)u; return 0.5 + s * s; }

bool in_b2(double s, double u) { return 2.0 * s * s > 1.0 && s + u > kSqrt2; }
bool in_b3(double s, double u) { return 2.0 * s * s < 1.0 && s * s + u * u > 1.0; }
bool in_closure_b2(double s, double u) { return 2.0 * s * s >= 1.0 && s + u >= kSqrt2; }
bool in_closure_b3(double s, double u) { return 2.0 * s * s <= 1.0 && s * s + u * u >= 1.0; }

double dist_point(double s, double u, double px, double py) {
    return std::hypot(s - px, u - py);
}

// Arc sigma^2 + tau^2 = 1 with |sigma| <= 1/sqrt(2) (B1/B3 boundary).
double dist_circle_arc(double s, double u) {
    double r = std::hypot(s, u);
    double theta = std::atan2(u, s);  // first quadrant: [0, pi/2]
    if (theta >= std::numbers::pi / 4.0) return std::abs(r - 1.0);
    return dist_point(s, u, kHalfSqrt2, kHalfSqrt2);
}

// Segment sigma + tau = sqrt(2), sigma in [1/sqrt(2), sqrt(2)] (B1/B2 boundary).
double dist_diag_segment(double s, double u) {
    // Foot of the perpendicular onto the line s + u = sqrt(2).
    double fs = s - 0.5 * (s + u - kSqrt2);
    if (fs >= kHalfSqrt2 && fs <= kSqrt2) return std::abs(s + u - kSqrt2) / kSqrt2;
    if (fs < kHalfSqrt2) return dist_point(s, u, kHalfSqrt2, kHalfSqrt2);
    return dist_point(s, u, kSqrt2, 0.0);
}

// Ray sigma = 1/sqrt(2), tau >= 1/sqrt(2) (B2/B3 boundary).
double dist_vertical_ray(double s, double u) {
    double du = std::max(0.0, kHalfSqrt2 - u);
    return std::hypot(s - kHalfSqrt2, du);
}

}  // namespace

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::B1: return "B1";
        case Phase::B2: return "B2";
        case Phase::B3: return "B3";
        default: return "Boundary";
    }
}

double boundary_distance(ComplexTemperature beta) {
    double s = std::abs(beta.sigma), u = std::abs(beta.tau);
    return std::min({dist_circle_arc(s, u), dist_diag_segment(s, u), dist_vertical_ray(s, u)});
}

PhaseLabel classify(ComplexTemperature beta, double tol) {
    double s = std::abs(beta.sigma), u = std::abs(beta.tau);
    bool on_boundary = boundary_distance(beta) <= tol;
    // The limit is continuous across the boundaries, so any adjacent formula
    // serves for boundary points.
    if (in_b2(s, u)) return {on_boundary ? Phase::Boundary : Phase::B2, limit_b2(s, u)};
    if (in_b3(s, u)) return {on_boundary ? Phase::Boundary : Phase::B3, limit_b3(s, u)};
    if (on_boundary) {
        double limit = in_closure_b2(s, u) ? limit_b2(s, u)
                       : in_closure_b3(s, u) ? limit_b3(s, u)
                                             : limit_b1(s, u);
        return {Phase::Boundary, limit};
    }
    // Closure points of B2/B3 that are not within tol (can only happen with
    // tol = 0) still get the matching formula; the values agree anyway.
    if (in_closure_b2(s, u)) return {Phase::Boundary, limit_b2(s, u)};
    if (in_closure_b3(s, u)) return {Phase::Boundary, limit_b3(s, u)};
    return {Phase::B1, limit_b1(s, u)};
}

double m_of_t(double t) {
    if (!(t > 0.0)) throw DomainError("m(t) needs t > 0");
    return kSqrt2 * t - std::log(t) / (2.0 * kSqrt2);
}

double extremal_centering(double t) {
    if (!(t > 0.0)) throw DomainError("extremal centering needs t > 0");
    return kSqrt2 * t - 3.0 * std::log(t) / (2.0 * kSqrt2);
}

double m_A(double s, double t, const SpeedFunction& A) {
    if (s == 0.0) return 0.0;  // continuity convention
    if (!(s > 0.0 && s <= t)) throw DomainError("m_A needs 0 < s <= t");
    double v = A.variance_profile(s, t);
    return std::sqrt(2.0 * s * v) - std::sqrt(v) / (2.0 * std::sqrt(2.0 * s)) * std::log(s);
}

double envelope_U(double s, double t, const SpeedFunction& A, const EnvelopeSpec& spec) {
    double v = A.variance_profile(s, t);
    double clamp = std::max(spec.c, std::min(v, t - v));
    return m_A(s, t, A) + std::pow(clamp, spec.gamma);
}

}  // namespace crem
