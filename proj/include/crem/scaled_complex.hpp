#pragma once
// Overflow-safe accumulation of sums of complex exponentials. A value is
// mantissa * e^{log_scale}; the mantissa is renormalized by exact powers of
// two whenever its magnitude leaves [2^-256, 2^256], and additions carry a
// Neumaier compensation term so cancellation-heavy sums (large tau) keep the
// digits the representation can hold. |X| ~ e^{Theta(t)} makes plain doubles
// unusable here.

#include <cmath>
#include <complex>

namespace crem {

namespace scaled_detail {

// Lazy renormalization band on |mantissa| and the pre-add trigger on the
// relative exponent of an incoming term (256*ln2: a fresh term may be at most
// 2^256 times the current scale before the scale is shifted up).
inline constexpr double kBandLogHi = 177.445678223345993274;
inline constexpr double kBandAbs2Hi = 0x1.0p+512;
inline constexpr double kBandAbs2Lo = 0x1.0p-512;

// Neumaier running-error addition: sum += v with compensation comp.
inline void compensated_add(double& sum, double& comp, double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
        comp += (sum - t) + v;
    else
        comp += (v - t) + sum;
    sum = t;
}

}  // namespace scaled_detail

struct ScaledComplex {
    double log_scale = 0.0;
    std::complex<double> mantissa{0.0, 0.0};
    std::complex<double> comp{0.0, 0.0};

    bool is_zero() const {
        return mantissa.real() == 0.0 && mantissa.imag() == 0.0 && comp.real() == 0.0 &&
               comp.imag() == 0.0;
    }

    // acc += e^{log_mag + i*phase}
    void add_term(double log_mag, double phase);

    // acc += e^{exponent}
    void add_exp(std::complex<double> exponent) { add_term(exponent.real(), exponent.imag()); }

    // Merge another scaled sum (used when folding replicas).
    void add(const ScaledComplex& other);

    // Canonical form: |mantissa| in [1,2) (or exact zero), compensation folded in.
    ScaledComplex normalized() const;

    // mantissa_total * e^{log_scale + log_shift} * e^{i*phase_shift}.
    // Underflow comes out as exact 0, overflow as inf.
    std::complex<double> value_scaled(double log_shift = 0.0, double phase_shift = 0.0) const;

    std::complex<double> value() const { return value_scaled(0.0); }

    // log|value|; -inf for zero.
    double log_abs() const;

    // Shift log_scale by k*ln2, scaling mantissa and comp by 2^-k (exact).
    void shift_scale(int k);
};

}  // namespace crem
