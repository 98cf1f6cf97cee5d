#pragma once
// Exact finite-t moment formulas: closed forms where available, adaptive
// Simpson quadrature otherwise; exact per-segment integration for piecewise
// linear profiles (the exponent is piecewise linear in s there). These are the
// ground truth the Monte Carlo estimates are checked against.
//
// Many-to-two assembly for E|N_{tau,sigma}(t)|^2 with N = X e^{-t(1/2+sigma^2)}:
//   diagonal (k = k') term   e^{-t(1+2 sigma^2)} e^t e^{2 sigma^2 t} = 1
//   off-diagonal             K * Int_0^t e^{t - s - (sigma^2+tau^2)(t - tA(s/t))} ds
// rho cancels exactly: the (1-rho^2) tau^2 factor from the Z-part against
// Re(lambda^2) from the Fourier part, lambda = sigma + i rho tau.
// For large t and beta in B3 the integral approaches K/((sigma^2+tau^2) sigma_e^2 - 1).
//
// The B1-normalized version, E|X e^{-t(1+(sigma^2-tau^2)/2)}|^2:
//   e^{t(sigma^2+tau^2-1)} + K * Int_0^t e^{-s + (sigma^2+tau^2) tA(s/t)} ds.
// At beta = 0 this is e^{-t} + K(1-e^{-t}), the GW second moment E[n(t)^2]e^{-2t}.

#include <complex>

#include "crem/speed_function.hpp"
#include "crem/types.hpp"

namespace crem {

struct QuadratureSpec {
    double rel_tol = 1e-9;
    int max_depth = 40;
};

// Exact E[X_{beta,rho}(t)] = e^{t(1+(sigma^2-tau^2)/2)} e^{i*phase_factor*rho*sigma*tau*t}.
std::complex<double> first_moment(ComplexTemperature beta, double rho, double t,
                                  double phase_factor = 1.0);

struct SecondMomentResult {
    double value = 0.0;
    bool divergence_warning = false;  // value still valid at finite t
};

// E|N_{tau,sigma}(t)|^2, diagonal included. rho is accepted for interface
// symmetry with the Monte Carlo side; it cancels identically (see above).
// Requires a strictly valid profile with finite sigma_e^2 (InfiniteEndSlope
// otherwise); warns when (sigma^2+tau^2) sigma_e^2 <= 1.
SecondMomentResult second_moment_abs(const SpeedFunction& A, ComplexTemperature beta, double rho,
                                     double t, double k_moment, QuadratureSpec quad = {});

// E|normalize_b1(X)|^2; warns outside the B1-convergent region
// (sigma^2 + tau^2 >= 1, or -x + (sigma^2+tau^2) A(x) >= 0 somewhere inside).
SecondMomentResult second_moment_b1_normalized(const SpeedFunction& A, ComplexTemperature beta,
                                               double rho, double t, double k_moment,
                                               QuadratureSpec quad = {});

// Integer-time union bound on envelope crossing:
//   min(1, sum_{j=1..floor(t)} e^j PhiBar(U_{A,gamma}(j) / sqrt(tA(j/t)))).
// Diagnostic upper bound on the discrete-time crossing event.
double envelope_union_bound(const SpeedFunction& A, double gamma, double c, double t);

// Ordered-pair term of the second-moment expansion for two leaves whose
// fields share variance v out of total T: E e^{lam x + conj(lam) x' + i ...}
// collapses to e^{2 sigma^2 v + (sigma^2 - tau^2)(T - v)}. Exposed so the
// discrete-surrogate oracle can cross-check the integrand.
double pair_second_moment_term(double shared_var, double total_var, ComplexTemperature beta);

// Standard normal upper tail, log-safe for large z.
double gaussian_upper_tail(double z);

}  // namespace crem
