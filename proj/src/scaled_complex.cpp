#include "crem/scaled_complex.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace crem {

using scaled_detail::compensated_add;

void ScaledComplex::shift_scale(int k) {
    log_scale += k * std::numbers::ln2;
    mantissa = {std::ldexp(mantissa.real(), -k), std::ldexp(mantissa.imag(), -k)};
    comp = {std::ldexp(comp.real(), -k), std::ldexp(comp.imag(), -k)};
}

void ScaledComplex::add_term(double log_mag, double phase) {
    if (is_zero()) {
        log_scale = log_mag;
        mantissa = {std::cos(phase), std::sin(phase)};
        comp = {0.0, 0.0};
        return;
    }
    double u = log_mag - log_scale;
    if (u > scaled_detail::kBandLogHi) {
        // Incoming term dwarfs the current scale: shift the scale up first.
        int k = static_cast<int>(std::ceil(u / std::numbers::ln2));
        shift_scale(k);
        u = log_mag - log_scale;
    }
    if (u < -1400.0) return;  // term is 0 at this scale even after compensation
    double f = std::exp(u);
    double re = mantissa.real(), im = mantissa.imag();
    double cre = comp.real(), cim = comp.imag();
    compensated_add(re, cre, f * std::cos(phase));
    compensated_add(im, cim, f * std::sin(phase));
    mantissa = {re, im};
    comp = {cre, cim};

    double a2 = re * re + im * im;
    if (a2 > scaled_detail::kBandAbs2Hi || (a2 < scaled_detail::kBandAbs2Lo && a2 != 0.0)) {
        int k = std::ilogb(std::max(std::abs(re), std::abs(im)));
        shift_scale(k);
    }
}

void ScaledComplex::add(const ScaledComplex& other) {
    if (other.is_zero()) return;
    if (is_zero()) {
        *this = other;
        return;
    }
    double delta = other.log_scale - log_scale;
    if (delta > scaled_detail::kBandLogHi) {
        int k = static_cast<int>(std::ceil(delta / std::numbers::ln2));
        shift_scale(k);
        delta = other.log_scale - log_scale;
    }
    double f = std::exp(delta);
    double re = mantissa.real(), im = mantissa.imag();
    double cre = comp.real(), cim = comp.imag();
    compensated_add(re, cre, f * other.mantissa.real());
    compensated_add(im, cim, f * other.mantissa.imag());
    cre += f * other.comp.real();
    cim += f * other.comp.imag();
    mantissa = {re, im};
    comp = {cre, cim};
    double a2 = re * re + im * im;
    if (a2 > scaled_detail::kBandAbs2Hi || (a2 < scaled_detail::kBandAbs2Lo && a2 != 0.0)) {
        int k = std::ilogb(std::max(std::abs(re), std::abs(im)));
        shift_scale(k);
    }
}

ScaledComplex ScaledComplex::normalized() const {
    ScaledComplex out;
    std::complex<double> m = mantissa + comp;
    if (m.real() == 0.0 && m.imag() == 0.0) return out;  // zero: log_scale 0, mantissa 0
    out.log_scale = log_scale;
    out.mantissa = m;
    double am = std::hypot(m.real(), m.imag());
    int k = std::ilogb(am);
    out.shift_scale(k);
    // ilogb uses the largest component's exponent; nudge until |m| lands in [1,2).
    while (std::hypot(out.mantissa.real(), out.mantissa.imag()) >= 2.0) out.shift_scale(1);
    while (std::hypot(out.mantissa.real(), out.mantissa.imag()) < 1.0) out.shift_scale(-1);
    return out;
}

std::complex<double> ScaledComplex::value_scaled(double log_shift, double phase_shift) const {
    std::complex<double> m = mantissa + comp;
    if (m.real() == 0.0 && m.imag() == 0.0) return {0.0, 0.0};
    double mag = std::exp(log_scale + log_shift);
    std::complex<double> v = m * mag;
    if (phase_shift != 0.0) v *= std::complex<double>(std::cos(phase_shift), std::sin(phase_shift));
    return v;
}

double ScaledComplex::log_abs() const {
    std::complex<double> m = mantissa + comp;
    double am = std::hypot(m.real(), m.imag());
    if (am == 0.0) return -std::numeric_limits<double>::infinity();
    return log_scale + std::log(am);
}

}  // namespace crem
