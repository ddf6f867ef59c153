#include "qosrec/kernels.hpp"

#include <cassert>
#include <cmath>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define QOSREC_X86 1
#else
#define QOSREC_X86 0
#endif

namespace qosrec::kern {

double sum_scalar(std::span<const double> a) {
    double s = 0.0;
    for (double x : a) s += x;
    return s;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sum_abs_diff_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
}

double sum_sq_diff_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

#if QOSREC_X86

namespace {

__attribute__((target("avx2,fma"))) inline double hsum256(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d h = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, h));
}

}  // namespace

__attribute__((target("avx2,fma"))) double sum_avx2(std::span<const double> a) {
    const double* p = a.data();
    std::size_t n = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
    double s = hsum256(acc);
    for (; i < n; ++i) s += p[i];
    return s;
}

__attribute__((target("avx2,fma"))) double dot_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const double* pa = a.data();
    const double* pb = b.data();
    std::size_t n = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc);
    double s = hsum256(acc);
    for (; i < n; ++i) s += pa[i] * pb[i];
    return s;
}

__attribute__((target("avx2,fma"))) double sum_abs_diff_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const double* pa = a.data();
    const double* pb = b.data();
    std::size_t n = a.size();
    // clears the sign bit
    const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc = _mm256_add_pd(acc, _mm256_and_pd(d, mask));
    }
    double s = hsum256(acc);
    for (; i < n; ++i) s += std::abs(pa[i] - pb[i]);
    return s;
}

__attribute__((target("avx2,fma"))) double sum_sq_diff_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const double* pa = a.data();
    const double* pb = b.data();
    std::size_t n = a.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum256(acc);
    for (; i < n; ++i) {
        double d = pa[i] - pb[i];
        s += d * d;
    }
    return s;
}

#endif  // QOSREC_X86

namespace {

bool detect_avx2() {
#if QOSREC_X86
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const bool g_avx2 = detect_avx2();

}  // namespace

bool using_avx2() { return g_avx2; }

double sum(std::span<const double> a) {
#if QOSREC_X86
    if (g_avx2) return sum_avx2(a);
#endif
    return sum_scalar(a);
}

double dot(std::span<const double> a, std::span<const double> b) {
#if QOSREC_X86
    if (g_avx2) return dot_avx2(a, b);
#endif
    return dot_scalar(a, b);
}

double sum_abs_diff(std::span<const double> a, std::span<const double> b) {
#if QOSREC_X86
    if (g_avx2) return sum_abs_diff_avx2(a, b);
#endif
    return sum_abs_diff_scalar(a, b);
}

double sum_sq_diff(std::span<const double> a, std::span<const double> b) {
#if QOSREC_X86
    if (g_avx2) return sum_sq_diff_avx2(a, b);
#endif
    return sum_sq_diff_scalar(a, b);
}

}  // namespace qosrec::kern
