#pragma once
// Single-lane accumulate step shared by the scalar kernel and the slow paths
// of the SIMD kernels. Must stay in lockstep with ScaledComplex::add_term.

#include <cmath>
#include <numbers>

#include "crem/kernels/partition_kernel.hpp"
#include "crem/scaled_complex.hpp"

namespace crem::kernels {

inline void lane_shift_scale(PartitionSoA& acc, std::size_t j, int k) {
    acc.log_scale[j] += k * std::numbers::ln2;
    acc.m_re[j] = std::ldexp(acc.m_re[j], -k);
    acc.m_im[j] = std::ldexp(acc.m_im[j], -k);
    acc.c_re[j] = std::ldexp(acc.c_re[j], -k);
    acc.c_im[j] = std::ldexp(acc.c_im[j], -k);
}

inline void lane_post_renorm(PartitionSoA& acc, std::size_t j) {
    double a2 = acc.m_re[j] * acc.m_re[j] + acc.m_im[j] * acc.m_im[j];
    if (a2 > scaled_detail::kBandAbs2Hi || (a2 < scaled_detail::kBandAbs2Lo && a2 != 0.0)) {
        int k = std::ilogb(std::max(std::abs(acc.m_re[j]), std::abs(acc.m_im[j])));
        lane_shift_scale(acc, j, k);
    }
}

// One term e^{sigma_j x + i tau_j y} into lane j, with the already-computed
// cos/sin of the phase (so SIMD slow paths can reuse vector results).
inline void lane_add(PartitionSoA& acc, std::size_t j, double x, double cos_ph, double sin_ph) {
    double log_mag = acc.sigma[j] * x;
    double u = log_mag - acc.log_scale[j];
    if (u > scaled_detail::kBandLogHi) {
        int k = static_cast<int>(std::ceil(u / std::numbers::ln2));
        lane_shift_scale(acc, j, k);
        u = log_mag - acc.log_scale[j];
    }
    if (u < -1400.0) return;
    double f = std::exp(u);
    scaled_detail::compensated_add(acc.m_re[j], acc.c_re[j], f * cos_ph);
    scaled_detail::compensated_add(acc.m_im[j], acc.c_im[j], f * sin_ph);
    lane_post_renorm(acc, j);
}

inline void lane_init(PartitionSoA& acc, std::size_t j, double x, double y) {
    double ph = acc.tau[j] * y;
    acc.log_scale[j] = acc.sigma[j] * x;
    acc.m_re[j] = std::cos(ph);
    acc.m_im[j] = std::sin(ph);
    acc.c_re[j] = 0.0;
    acc.c_im[j] = 0.0;
}

}  // namespace crem::kernels
