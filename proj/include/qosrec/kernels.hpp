#pragma once

#include <cstddef>
#include <span>

// Dense reduction kernels used by the statistics, similarity and metric code.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the unqualified entry points dispatch once at startup based on CPU support.

namespace qosrec::kern {

double sum_scalar(std::span<const double> a);
double dot_scalar(std::span<const double> a, std::span<const double> b);
double sum_abs_diff_scalar(std::span<const double> a, std::span<const double> b);
double sum_sq_diff_scalar(std::span<const double> a, std::span<const double> b);

#if defined(__x86_64__) || defined(_M_X64)
double sum_avx2(std::span<const double> a);
double dot_avx2(std::span<const double> a, std::span<const double> b);
double sum_abs_diff_avx2(std::span<const double> a, std::span<const double> b);
double sum_sq_diff_avx2(std::span<const double> a, std::span<const double> b);
#endif

// Dispatched entry points.
double sum(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double sum_abs_diff(std::span<const double> a, std::span<const double> b);
double sum_sq_diff(std::span<const double> a, std::span<const double> b);

// True when the AVX2 variants are selected at runtime.
bool using_avx2();

}  // namespace qosrec::kern
