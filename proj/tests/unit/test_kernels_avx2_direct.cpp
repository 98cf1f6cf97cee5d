// Direct accuracy checks of the vectorized exp/sincos against libm. Compiled
// with -mavx2 -mfma in its own translation unit; only entered behind the
// runtime CPU check in test_kernels.cpp.

#if defined(CREM_HAVE_AVX2_BUILD)

#include <cmath>

#include <immintrin.h>

#include "crem/rng.hpp"
#include "kernels/vec_math_avx2.hpp"

namespace crem_test {

// Reference calls go through volatile function pointers so the compiler
// cannot substitute vectorized (less accurate) libm variants in this
// -mavx2 -O3 translation unit.
namespace {
double (*volatile ref_exp)(double) = static_cast<double (*)(double)>(std::exp);
double (*volatile ref_sin)(double) = static_cast<double (*)(double)>(std::sin);
double (*volatile ref_cos)(double) = static_cast<double (*)(double)>(std::cos);
}  // namespace

// Max |simd - libm| / max(|libm|, dbl_min_normal) over random panels.
double vec_exp_max_rel_error(int n) {
    crem::RngStream rng(71, 0, crem::RngDomain::Fixture);
    double worst = 0.0;
    alignas(32) double in[4], out[4];
    for (int i = 0; i < n; i += 4) {
        for (int l = 0; l < 4; ++l) in[l] = -746.0 + 1456.0 * rng.next_unit_half();
        __m256d v = crem::kernels::exp_pd(_mm256_load_pd(in));
        _mm256_store_pd(out, v);
        for (int l = 0; l < 4; ++l) {
            double ref = ref_exp(in[l]);
            double denom = std::max(ref, 2.2250738585072014e-308);
            worst = std::max(worst, std::abs(out[l] - ref) / denom);
        }
    }
    return worst;
}

double vec_sincos_max_abs_error(int n) {
    crem::RngStream rng(72, 0, crem::RngDomain::Fixture);
    double worst = 0.0;
    alignas(32) double in[4], s[4], c[4];
    for (int i = 0; i < n; i += 4) {
        for (int l = 0; l < 4; ++l) in[l] = -1e5 + 2e5 * rng.next_unit_half();
        __m256d vs, vc;
        crem::kernels::sincos_pd(_mm256_load_pd(in), vs, vc);
        _mm256_store_pd(s, vs);
        _mm256_store_pd(c, vc);
        for (int l = 0; l < 4; ++l) {
            worst = std::max(worst, std::abs(s[l] - ref_sin(in[l])));
            worst = std::max(worst, std::abs(c[l] - ref_cos(in[l])));
        }
    }
    return worst;
}

// sin(-x) == -sin(x) and cos(-x) == cos(x), bitwise.
bool vec_sincos_symmetric(int n) {
    crem::RngStream rng(73, 0, crem::RngDomain::Fixture);
    alignas(32) double in[4], neg[4], sp[4], cp[4], sn[4], cn[4];
    for (int i = 0; i < n; i += 4) {
        for (int l = 0; l < 4; ++l) {
            in[l] = -5e4 + 1e5 * rng.next_unit_half();
            neg[l] = -in[l];
        }
        __m256d vs, vc;
        crem::kernels::sincos_pd(_mm256_load_pd(in), vs, vc);
        _mm256_store_pd(sp, vs);
        _mm256_store_pd(cp, vc);
        crem::kernels::sincos_pd(_mm256_load_pd(neg), vs, vc);
        _mm256_store_pd(sn, vs);
        _mm256_store_pd(cn, vc);
        for (int l = 0; l < 4; ++l) {
            if (sp[l] != -sn[l] || cp[l] != cn[l]) return false;
        }
    }
    return true;
}

}  // namespace crem_test

#endif  // CREM_HAVE_AVX2_BUILD
