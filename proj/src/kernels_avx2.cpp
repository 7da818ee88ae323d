// AVX2+FMA variants of the weighted-moment kernels. Compiled with
// -mavx2 -mfma and reached only through the runtime dispatch in
// kernels.cpp, so the rest of the library stays baseline-ISA.

#include "robrenyi/kernels.hpp"

#if defined(ROBRENYI_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cmath>

namespace robrenyi::kernels {

namespace {

// Vector e^x: Cody-Waite reduction x = n*ln2 + r, degree-13 Taylor on
// [-ln2/2, ln2/2], scale by 2^n through the exponent bits. Arguments in
// this library are <= 0 up to the log shift; inputs below the double
// underflow threshold return exactly 0. Accuracy ~2 ulp.
inline __m256d exp_pd(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
    __m256d xc = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
    xc = _mm256_min_pd(xc, _mm256_set1_pd(709.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    __m256d p = _mm256_set1_pd(1.6059043836821613e-10); // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.0876756987868099e-09));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.5052108385441720e-08));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985888e-07));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985893e-06));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.4801587301587302e-05));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.9841269841269841e-04));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.3888888888888889e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.3333333333333332e-03));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.1666666666666664e-02));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.6666666666666666e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits = _mm256_slli_epi64(
        _mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    p = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, p);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

} // namespace

PowerMoments gaussian_power_moments_avx2(std::span<const double> x, double m,
                                         double sigma, double alpha,
                                         double log_shift) {
    const std::size_t n = x.size();
    const __m256d vm = _mm256_set1_pd(m);
    const __m256d vinv = _mm256_set1_pd(1.0 / sigma);
    const __m256d vha = _mm256_set1_pd(-0.5 * alpha);
    const __m256d vshift = _mm256_set1_pd(log_shift);

    __m256d a0 = _mm256_setzero_pd(), a1 = a0, a2 = a0, a3 = a0, a4 = a0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x.data() + i);
        const __m256d u = _mm256_mul_pd(_mm256_sub_pd(xi, vm), vinv);
        const __m256d u2 = _mm256_mul_pd(u, u);
        const __m256d w = exp_pd(_mm256_fmadd_pd(vha, u2, vshift));
        a0 = _mm256_add_pd(a0, w);
        const __m256d wu = _mm256_mul_pd(w, u);
        a1 = _mm256_add_pd(a1, wu);
        const __m256d wu2 = _mm256_mul_pd(w, u2);
        a2 = _mm256_add_pd(a2, wu2);
        a3 = _mm256_add_pd(a3, _mm256_mul_pd(wu2, u));
        a4 = _mm256_add_pd(a4, _mm256_mul_pd(wu2, u2));
    }
    PowerMoments out{hsum(a0), hsum(a1), hsum(a2), hsum(a3), hsum(a4)};
    if (i < n) {
        const PowerMoments tail = gaussian_power_moments_scalar(
            x.subspan(i), m, sigma, alpha, log_shift);
        out.s0 += tail.s0;
        out.s1 += tail.s1;
        out.s2 += tail.s2;
        out.s3 += tail.s3;
        out.s4 += tail.s4;
    }
    return out;
}

DecayMoments exp_decay_moments_avx2(std::span<const double> x, double theta,
                                    double alpha, double log_shift) {
    const std::size_t n = x.size();
    const __m256d vinv = _mm256_set1_pd(1.0 / theta);
    const __m256d va = _mm256_set1_pd(-alpha);
    const __m256d vshift = _mm256_set1_pd(log_shift);
    const __m256d zero = _mm256_setzero_pd();

    __m256d a0 = zero, a1 = zero, a2 = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xi = _mm256_loadu_pd(x.data() + i);
        const __m256d v = _mm256_mul_pd(xi, vinv);
        const __m256d in_support = _mm256_cmp_pd(xi, zero, _CMP_GE_OQ);
        __m256d w = exp_pd(_mm256_fmadd_pd(va, v, vshift));
        w = _mm256_and_pd(w, in_support);
        a0 = _mm256_add_pd(a0, w);
        const __m256d wv = _mm256_mul_pd(w, v);
        a1 = _mm256_add_pd(a1, wv);
        a2 = _mm256_add_pd(a2, _mm256_mul_pd(wv, v));
    }
    DecayMoments out{hsum(a0), hsum(a1), hsum(a2)};
    if (i < n) {
        const DecayMoments tail =
            exp_decay_moments_scalar(x.subspan(i), theta, alpha, log_shift);
        out.s0 += tail.s0;
        out.s1 += tail.s1;
        out.s2 += tail.s2;
    }
    return out;
}

void exp_weights_avx2(std::span<const double> residuals, double sigma,
                      double alpha, std::span<double> w) {
    const std::size_t n = residuals.size();
    const __m256d vinv = _mm256_set1_pd(1.0 / sigma);
    const __m256d vha = _mm256_set1_pd(-0.5 * alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(residuals.data() + i), vinv);
        _mm256_storeu_pd(w.data() + i, exp_pd(_mm256_mul_pd(vha, _mm256_mul_pd(u, u))));
    }
    if (i < n)
        exp_weights_scalar(residuals.subspan(i), sigma, alpha, w.subspan(i));
}

} // namespace robrenyi::kernels

#endif // ROBRENYI_HAVE_AVX2_KERNELS
