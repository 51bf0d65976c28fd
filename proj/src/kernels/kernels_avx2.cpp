// AVX2 + FMA variants of the reduction kernels.  This translation unit is the
// only one compiled with -mavx2; it must not be entered unless the CPU
// reports AVX2 (the dispatcher guarantees that).
//
// Reductions accumulate in 4 independent lanes and combine once at the end,
// so the rounding differs from the scalar loop by a bounded reassociation
// error only.

#include "thermoshape/kernels.hpp"

#include <immintrin.h>

namespace thermoshape::kernels {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_avx2(const double* a, const double* b, const double* c, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(ab, _mm256_loadu_pd(c + i), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i] * c[i];
    return s;
}

double wsq_avx2(const double* w, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d bv = _mm256_loadu_pd(b + i);
        __m256d wb = _mm256_mul_pd(_mm256_loadu_pd(w + i), bv);
        acc = _mm256_fmadd_pd(wb, bv, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * b[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        yv = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), yv);
        _mm256_storeu_pd(y + i, yv);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

const Ops& avx2_ops();  // referenced by the dispatcher

const Ops& avx2_ops() {
    static const Ops ops{dot_avx2, dot3_avx2, wsq_avx2, axpy_avx2, "avx2"};
    return ops;
}

}  // namespace thermoshape::kernels
