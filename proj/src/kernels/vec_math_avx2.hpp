#pragma once
// 4-wide double-precision exp and sincos on AVX2+FMA, Cephes-style polynomials
// with Cody-Waite range reduction. exp is accurate to a few ulp on
// [-1400, 709]; sincos needs |x| <= ~1.6e6 so that n*PIO2_1 stays exact
// (arguments here are tau*y, a few hundred at desk scale). Both are odd/even
// symmetric in the argument so conjugation symmetry of the partition sum
// survives vectorization bit-for-bit.

#include <immintrin.h>

namespace crem::kernels {

// 2^k for integral-valued doubles k in [-1022, 1023].
inline __m256d pow2_pd(__m256d k) {
    __m128i ki = _mm256_cvtpd_epi32(k);
    __m256i k64 = _mm256_cvtepi32_epi64(ki);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(k64, _mm256_set1_epi64x(1023)), 52);
    return _mm256_castsi256_pd(bits);
}

inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.44269504088896340736);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);

    x = _mm256_min_pd(x, _mm256_set1_pd(709.782712893384));
    x = _mm256_max_pd(x, _mm256_set1_pd(-1400.0));

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, x);
    r = _mm256_fnmadd_pd(n, c2, r);
    __m256d z = _mm256_mul_pd(r, r);

    // e^r = 1 + 2 r P(r^2) / (Q(r^2) - r P(r^2)) on |r| <= ln2/2 (Cephes exp.c).
    __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(3.02994407707441961300e-2));
    p = _mm256_fmadd_pd(p, z, _mm256_set1_pd(9.99999999999999999910e-1));
    p = _mm256_mul_pd(p, r);
    __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.52448340349684104192e-3));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.27265548208155028766e-1));
    q = _mm256_fmadd_pd(q, z, _mm256_set1_pd(2.00000000000000000005e0));
    __m256d e = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    e = _mm256_fmadd_pd(e, _mm256_set1_pd(2.0), _mm256_set1_pd(1.0));

    // Scale by 2^n in two exact steps so subnormal results survive.
    __m256d nh = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
    __m256d nl = _mm256_sub_pd(n, nh);
    e = _mm256_mul_pd(e, pow2_pd(nh));
    e = _mm256_mul_pd(e, pow2_pd(nl));
    return e;
}

inline void sincos_pd(__m256d x, __m256d& sin_out, __m256d& cos_out) {
    const __m256d two_over_pi = _mm256_set1_pd(6.36619772367581343076e-1);
    const __m256d pio2_1 = _mm256_set1_pd(1.57079632673412561417e+0);
    const __m256d pio2_1t = _mm256_set1_pd(6.07710050650619224932e-11);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, two_over_pi),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, pio2_1, x);
    r = _mm256_fnmadd_pd(n, pio2_1t, r);

    __m128i qi = _mm256_cvtpd_epi32(n);
    __m256i q = _mm256_cvtepi32_epi64(qi);

    __m256d z = _mm256_mul_pd(r, r);

    // sin(r) = r + r z S(z), cos(r) = 1 - z/2 + z^2 C(z) on |r| <= pi/4.
    __m256d s = _mm256_set1_pd(1.58962301576546568060e-10);
    s = _mm256_fmadd_pd(s, z, _mm256_set1_pd(-2.50507477628578072866e-8));
    s = _mm256_fmadd_pd(s, z, _mm256_set1_pd(2.75573136213857245213e-6));
    s = _mm256_fmadd_pd(s, z, _mm256_set1_pd(-1.98412698295895385996e-4));
    s = _mm256_fmadd_pd(s, z, _mm256_set1_pd(8.33333333332211858878e-3));
    s = _mm256_fmadd_pd(s, z, _mm256_set1_pd(-1.66666666666666307295e-1));
    __m256d poly_s = _mm256_fmadd_pd(_mm256_mul_pd(r, z), s, r);

    __m256d c = _mm256_set1_pd(-1.13585365213876817300e-11);
    c = _mm256_fmadd_pd(c, z, _mm256_set1_pd(2.08757008419747316778e-9));
    c = _mm256_fmadd_pd(c, z, _mm256_set1_pd(-2.75573141792967388112e-7));
    c = _mm256_fmadd_pd(c, z, _mm256_set1_pd(2.48015872888517179954e-5));
    c = _mm256_fmadd_pd(c, z, _mm256_set1_pd(-1.38888888888730564116e-3));
    c = _mm256_fmadd_pd(c, z, _mm256_set1_pd(4.16666666666665929218e-2));
    __m256d poly_c = _mm256_fmadd_pd(_mm256_mul_pd(z, z), c,
                                     _mm256_fnmadd_pd(z, _mm256_set1_pd(0.5), _mm256_set1_pd(1.0)));

    // Quadrant selection: q&1 swaps sin/cos, q&2 negates sin, (q+1)&2 negates cos.
    const __m256i one = _mm256_set1_epi64x(1);
    const __m256i two = _mm256_set1_epi64x(2);
    __m256d swap_mask = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(_mm256_and_si256(q, one), one));
    __m256d sin_neg = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(_mm256_and_si256(q, two), two));
    __m256d cos_neg = _mm256_castsi256_pd(
        _mm256_cmpeq_epi64(_mm256_and_si256(_mm256_add_epi64(q, one), two), two));

    const __m256d signbit = _mm256_set1_pd(-0.0);
    __m256d sv = _mm256_blendv_pd(poly_s, poly_c, swap_mask);
    __m256d cv = _mm256_blendv_pd(poly_c, poly_s, swap_mask);
    sin_out = _mm256_xor_pd(sv, _mm256_and_pd(sin_neg, signbit));
    cos_out = _mm256_xor_pd(cv, _mm256_and_pd(cos_neg, signbit));
}

}  // namespace crem::kernels
