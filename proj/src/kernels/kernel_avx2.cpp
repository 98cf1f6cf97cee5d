#include <immintrin.h>

#include <cmath>

#include "accum_lane.hpp"
#include "crem/kernels/partition_kernel.hpp"
#include "vec_math_avx2.hpp"

namespace crem::kernels {

namespace {

inline __m256d abs_pd(__m256d v) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v); }

// Neumaier step on 4 lanes: sum += v, error into comp.
inline void compensated_add_pd(__m256d& sum, __m256d& comp, __m256d v) {
    __m256d t = _mm256_add_pd(sum, v);
    __m256d big = _mm256_cmp_pd(abs_pd(sum), abs_pd(v), _CMP_GE_OQ);
    __m256d err_big = _mm256_add_pd(_mm256_sub_pd(sum, t), v);
    __m256d err_small = _mm256_add_pd(_mm256_sub_pd(v, t), sum);
    comp = _mm256_add_pd(comp, _mm256_blendv_pd(err_small, err_big, big));
    sum = t;
}

}  // namespace

void accumulate_leaf_avx2(PartitionSoA& acc, double x, double y) {
    const std::size_t n = acc.size();
    if (acc.empty) {
        for (std::size_t j = 0; j < n; ++j) lane_init(acc, j, x, y);
        acc.empty = false;
        return;
    }

    const __m256d xv = _mm256_set1_pd(x);
    const __m256d yv = _mm256_set1_pd(y);
    const __m256d band_log_hi = _mm256_set1_pd(scaled_detail::kBandLogHi);
    const __m256d band_abs2_hi = _mm256_set1_pd(scaled_detail::kBandAbs2Hi);
    const __m256d band_abs2_lo = _mm256_set1_pd(scaled_detail::kBandAbs2Lo);
    const __m256d zero = _mm256_setzero_pd();

    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        __m256d sig = _mm256_loadu_pd(&acc.sigma[j]);
        __m256d ls = _mm256_loadu_pd(&acc.log_scale[j]);
        __m256d u = _mm256_fmsub_pd(sig, xv, ls);

        // A term far above the current scale needs a scale shift first; rare,
        // handled lane-by-lane through the scalar path.
        if (_mm256_movemask_pd(_mm256_cmp_pd(u, band_log_hi, _CMP_GT_OQ)) != 0) {
            for (std::size_t l = j; l < j + 4; ++l) {
                double ph = acc.tau[l] * y;
                lane_add(acc, l, x, std::cos(ph), std::sin(ph));
            }
            continue;
        }

        __m256d f = exp_pd(u);
        __m256d ph = _mm256_mul_pd(_mm256_loadu_pd(&acc.tau[j]), yv);
        __m256d sin_ph, cos_ph;
        sincos_pd(ph, sin_ph, cos_ph);

        __m256d m_re = _mm256_loadu_pd(&acc.m_re[j]);
        __m256d m_im = _mm256_loadu_pd(&acc.m_im[j]);
        __m256d c_re = _mm256_loadu_pd(&acc.c_re[j]);
        __m256d c_im = _mm256_loadu_pd(&acc.c_im[j]);

        compensated_add_pd(m_re, c_re, _mm256_mul_pd(f, cos_ph));
        compensated_add_pd(m_im, c_im, _mm256_mul_pd(f, sin_ph));

        _mm256_storeu_pd(&acc.m_re[j], m_re);
        _mm256_storeu_pd(&acc.m_im[j], m_im);
        _mm256_storeu_pd(&acc.c_re[j], c_re);
        _mm256_storeu_pd(&acc.c_im[j], c_im);

        __m256d a2 = _mm256_fmadd_pd(m_re, m_re, _mm256_mul_pd(m_im, m_im));
        __m256d need = _mm256_or_pd(
            _mm256_cmp_pd(a2, band_abs2_hi, _CMP_GT_OQ),
            _mm256_and_pd(_mm256_cmp_pd(a2, band_abs2_lo, _CMP_LT_OQ),
                          _mm256_cmp_pd(a2, zero, _CMP_NEQ_UQ)));
        int mask = _mm256_movemask_pd(need);
        if (mask != 0) {
            for (int l = 0; l < 4; ++l)
                if (mask & (1 << l)) lane_post_renorm(acc, j + l);
        }
    }
    for (; j < n; ++j) {
        double ph = acc.tau[j] * y;
        lane_add(acc, j, x, std::cos(ph), std::sin(ph));
    }
}

}  // namespace crem::kernels
