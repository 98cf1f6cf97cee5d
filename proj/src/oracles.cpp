#include "crem/oracles.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "crem/phases.hpp"

namespace crem {

namespace {

// Adaptive Simpson with an absolute budget derived from a coarse first pass.
struct Simpson {
    const std::function<double(double)>& f;
    int max_depth;

    double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                   int depth) const {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = f(lm), frm = f(rm);
        double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (depth >= max_depth || std::abs(delta) <= 15.0 * eps)
            return left + right + delta / 15.0;
        return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
    }
};

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& quad) {
    if (!(b > a)) return 0.0;
    const int panels = 32;
    double h = (b - a) / panels;
    // Coarse scale estimate to convert the relative tolerance into an
    // absolute budget per panel.
    double coarse = 0.0;
    for (int i = 0; i < panels; ++i) {
        double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        coarse += h / 6.0 * (f(x0) + 4.0 * f(xm) + f(x1));
    }
    double eps = quad.rel_tol * std::max(std::abs(coarse), 1e-300) / panels;
    Simpson s{f, quad.max_depth};
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        double x0 = a + i * h, x1 = x0 + h, xm = 0.5 * (x0 + x1);
        double f0 = f(x0), fm = f(xm), f1 = f(x1);
        double whole = h / 6.0 * (f0 + 4.0 * fm + f1);
        total += s.recurse(x0, x1, f0, fm, f1, whole, eps, 0);
    }
    return total;
}

// Exact integral of exp(alpha + beta_s * s + q * tA(s/t)) over [0, t] for a
// piecewise linear profile: the exponent is linear on each knot segment.
double exact_pwl_integral(const SpeedFunction& A, double t, double q, double alpha,
                          double beta_s) {
    const auto& knots = A.knots();
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double s0 = knots[i].first * t, s1 = knots[i + 1].first * t;
        if (!(s1 > s0)) continue;
        double v0 = knots[i].second * t, v1 = knots[i + 1].second * t;
        double slope_v = (v1 - v0) / (s1 - s0);
        double e0 = alpha + beta_s * s0 + q * v0;
        double b = beta_s + q * slope_v;
        double len = s1 - s0;
        double bl = b * len;
        double seg;
        if (std::abs(bl) < 1e-12)
            seg = std::exp(e0) * len * (1.0 + 0.5 * bl);
        else
            seg = std::exp(e0) * std::expm1(bl) / b;
        total += seg;
    }
    return total;
}

// Int_0^t exp(alpha + beta_s*s + q*tA(s/t)) ds, routing to the exact segment
// formula for piecewise linear profiles, adaptive quadrature otherwise.
// `substitute` integrates in u = t - s to concentrate splitting near s = t.
double profile_integral(const SpeedFunction& A, double t, double q, double alpha, double beta_s,
                        const QuadratureSpec& quad, bool substitute) {
    if (A.form() == SpeedFunction::Form::PiecewiseLinear)
        return exact_pwl_integral(A, t, q, alpha, beta_s);
    if (substitute) {
        auto f = [&](double u) {
            double s = t - u;
            return std::exp(alpha + beta_s * s + q * A.variance_profile(s, t));
        };
        return integrate(f, 0.0, t, quad);
    }
    auto f = [&](double s) {
        return std::exp(alpha + beta_s * s + q * A.variance_profile(s, t));
    };
    return integrate(f, 0.0, t, quad);
}

}  // namespace

std::complex<double> first_moment(ComplexTemperature beta, double rho, double t,
                                  double phase_factor) {
    if (!(t >= 0.0)) throw DomainError("first_moment needs t >= 0");
    double log_mag = t * (1.0 + 0.5 * (beta.sigma * beta.sigma - beta.tau * beta.tau));
    double phase = phase_factor * rho * beta.sigma * beta.tau * t;
    return std::polar(std::exp(log_mag), phase);
}

SecondMomentResult second_moment_abs(const SpeedFunction& A, ComplexTemperature beta, double rho,
                                     double t, double k_moment, QuadratureSpec quad) {
    (void)rho;  // cancels identically in the pair expectation
    double sigma_e = A.sigma_e_sq();  // InfiniteEndSlope propagates
    double q = beta.sigma * beta.sigma + beta.tau * beta.tau;
    SecondMomentResult res;
    res.divergence_warning = q * sigma_e <= 1.0;
    if (t == 0.0) {
        res.value = 1.0;
        return res;
    }
    // exp(t - s - q(t - tA(s/t))) = exp(t(1-q) - s + q tA(s/t))
    double integral =
        profile_integral(A, t, q, t * (1.0 - q), -1.0, quad, /*substitute=*/sigma_e > 10.0);
    res.value = 1.0 + k_moment * integral;
    return res;
}

SecondMomentResult second_moment_b1_normalized(const SpeedFunction& A, ComplexTemperature beta,
                                               double rho, double t, double k_moment,
                                               QuadratureSpec quad) {
    (void)rho;
    double q = beta.sigma * beta.sigma + beta.tau * beta.tau;
    SecondMomentResult res;
    res.divergence_warning = q >= 1.0;
    if (!res.divergence_warning) {
        for (int i = 1; i < 512; ++i) {
            double x = i / 512.0;
            if (-x + q * A.eval(x) >= 0.0) {
                res.divergence_warning = true;
                break;
            }
        }
    }
    if (t == 0.0) {
        res.value = 1.0;
        return res;
    }
    double integral = profile_integral(A, t, q, 0.0, -1.0, quad, /*substitute=*/false);
    res.value = std::exp(t * (q - 1.0)) + k_moment * integral;
    return res;
}

double gaussian_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double envelope_union_bound(const SpeedFunction& A, double gamma, double c, double t) {
    EnvelopeSpec spec{gamma, c};
    double sum = 0.0;
    for (int j = 1; j <= static_cast<int>(std::floor(t)); ++j) {
        double v = A.variance_profile(static_cast<double>(j), t);
        if (!(v > 0.0)) continue;  // flat start: x(j) = 0 a.s., envelope positive
        double u = envelope_U(static_cast<double>(j), t, A, spec);
        sum += std::exp(static_cast<double>(j)) * gaussian_upper_tail(u / std::sqrt(v));
    }
    return std::min(1.0, sum);
}

double pair_second_moment_term(double shared_var, double total_var, ComplexTemperature beta) {
    double s2 = beta.sigma * beta.sigma, t2 = beta.tau * beta.tau;
    return std::exp(2.0 * s2 * shared_var + (s2 - t2) * (total_var - shared_var));
}

}  // namespace crem
