#pragma once
// Closed-form phase classification of beta = sigma + i*tau, the limiting
// log-partition values, the maximum centering m(t) and its time-s analogue
// m_A(s), and the deterministic upper envelope U_{A,gamma}.
//
// Domains (first quadrant; everything is symmetric in sigma -> -sigma and
// tau -> -tau):
//   B2 = { 2 sigma^2 > 1, |sigma|+|tau| > sqrt(2) }     limit sqrt(2)|sigma|
//   B3 = { 2 sigma^2 < 1, sigma^2+tau^2 > 1 }           limit 1/2 + sigma^2
//   B1 = complement of the closure of B2 u B3           limit 1 + (sigma^2-tau^2)/2
// The three formulas agree on the shared boundaries.

#include "crem/speed_function.hpp"
#include "crem/types.hpp"

namespace crem {

enum class Phase { B1, B2, B3, Boundary };

const char* phase_name(Phase p);

struct PhaseLabel {
    Phase label;
    double predicted_limit;
};

// Euclidean distance in the (sigma, tau) plane to the nearest phase-boundary
// curve (circle arc, diagonal segment, vertical ray, restricted to the
// junctions where they actually separate phases).
double boundary_distance(ComplexTemperature beta);

PhaseLabel classify(ComplexTemperature beta, double tol = 1e-9);

// m(t) = sqrt(2) t - log(t)/(2 sqrt(2)); DomainError for t <= 0.
double m_of_t(double t);

// Centering of the extremal process driving the glassy phase:
// sqrt(2) t - 3 log(t)/(2 sqrt(2)). Differs from m_of_t in the log
// coefficient; this is the constant under which max_k x_k(t) is tight, so the
// B2 column of the phase-diagram scan is corrected with it.
double extremal_centering(double t);

// m_A(s) = sqrt(2 s t A(s/t)) - sqrt(t A(s/t)) / (2 sqrt(2 s)) * log(s),
// with m_A(0) := 0. Satisfies m_A(t) = m(t).
double m_A(double s, double t, const SpeedFunction& A);

// U_{A,gamma}(s) = m_A(s) + (max(C, min(tA(s/t), t - tA(s/t))))^gamma.
double envelope_U(double s, double t, const SpeedFunction& A, const EnvelopeSpec& spec);

}  // namespace crem
