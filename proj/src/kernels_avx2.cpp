// AVX2 variants of the selection kernels. Compiled with -mavx2 -mfma; the
// dispatcher only hands out this backend after a cpuid check.

#include "pmuplace/kernels.hpp"

#if defined(PMUPLACE_HAVE_AVX2)

#include <immintrin.h>

#include <limits>

namespace pmuplace::kernels {

namespace {

inline double hmin(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_min_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    lo = _mm_min_sd(lo, swapped);
    return _mm_cvtsd_f64(lo);
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    lo = _mm_add_sd(lo, swapped);
    return _mm_cvtsd_f64(lo);
}

void add_assign_avx2(double* acc, const double* row, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d a0 = _mm256_loadu_pd(acc + i);
        __m256d a1 = _mm256_loadu_pd(acc + i + 4);
        a0 = _mm256_add_pd(a0, _mm256_loadu_pd(row + i));
        a1 = _mm256_add_pd(a1, _mm256_loadu_pd(row + i + 4));
        _mm256_storeu_pd(acc + i, a0);
        _mm256_storeu_pd(acc + i + 4, a1);
    }
    for (; i < n; ++i) acc[i] += row[i];
}

void add_to_avx2(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d s0 = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d s1 = _mm256_add_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        _mm256_storeu_pd(dst + i, s0);
        _mm256_storeu_pd(dst + i + 4, s1);
    }
    for (; i < n; ++i) dst[i] = a[i] + b[i];
}

double min_plus_avx2(const double* acc, const double* row, std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d m0 = _mm256_set1_pd(inf);
    __m256d m1 = _mm256_set1_pd(inf);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d s0 = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(row + i));
        __m256d s1 = _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), _mm256_loadu_pd(row + i + 4));
        m0 = _mm256_min_pd(m0, s0);
        m1 = _mm256_min_pd(m1, s1);
    }
    double m = hmin(_mm256_min_pd(m0, m1));
    for (; i < n; ++i) {
        const double v = acc[i] + row[i];
        if (v < m) m = v;
    }
    return m;
}

double min_reduce_avx2(const double* v, std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    __m256d m0 = _mm256_set1_pd(inf);
    __m256d m1 = _mm256_set1_pd(inf);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        m0 = _mm256_min_pd(m0, _mm256_loadu_pd(v + i));
        m1 = _mm256_min_pd(m1, _mm256_loadu_pd(v + i + 4));
    }
    double m = hmin(_mm256_min_pd(m0, m1));
    for (; i < n; ++i)
        if (v[i] < m) m = v[i];
    return m;
}

double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        s0 = _mm256_fmadd_pd(d0, d0, s0);
        s1 = _mm256_fmadd_pd(d1, d1, s1);
    }
    double s = hsum(_mm256_add_pd(s0, s1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void abs_diff_sq_avx2(double* dst, const double* a, const double* b, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(dst + i, _mm256_mul_pd(d, d));
    }
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        dst[i] = d * d;
    }
}

constexpr Backend kAvx2 = {
    "avx2",         add_assign_avx2, add_to_avx2,
    min_plus_avx2,  min_reduce_avx2, sq_dist_avx2,
    abs_diff_sq_avx2,
};

}  // namespace

const Backend& avx2_backend() { return kAvx2; }

bool avx2_supported() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

}  // namespace pmuplace::kernels

#endif  // PMUPLACE_HAVE_AVX2
