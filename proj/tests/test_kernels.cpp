#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qosrec/kernels.hpp"

using namespace qosrec;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

}  // namespace

TEST_CASE("scalar kernels on tiny inputs") {
    std::vector<double> a{1.0, 2.0, 3.0};
    std::vector<double> b{4.0, -5.0, 6.0};
    CHECK(kern::sum_scalar(a) == doctest::Approx(6.0));
    CHECK(kern::dot_scalar(a, b) == doctest::Approx(4.0 - 10.0 + 18.0));
    CHECK(kern::sum_abs_diff_scalar(a, b) == doctest::Approx(3.0 + 7.0 + 3.0));
    CHECK(kern::sum_sq_diff_scalar(a, b) == doctest::Approx(9.0 + 49.0 + 9.0));
    CHECK(kern::sum_scalar({}) == 0.0);
}

TEST_CASE("dispatched kernels match scalar reference across sizes") {
    std::mt19937_64 gen(7);
    // covers empty, sub-vector-width and remainder lengths
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 1000, 1003}) {
        auto a = random_vec(n, gen);
        auto b = random_vec(n, gen);
        double tol = 1e-12 * (1.0 + static_cast<double>(n));
        CHECK(kern::sum(a) == doctest::Approx(kern::sum_scalar(a)).epsilon(tol));
        CHECK(kern::dot(a, b) == doctest::Approx(kern::dot_scalar(a, b)).epsilon(tol));
        CHECK(kern::sum_abs_diff(a, b) ==
              doctest::Approx(kern::sum_abs_diff_scalar(a, b)).epsilon(tol));
        CHECK(kern::sum_sq_diff(a, b) ==
              doctest::Approx(kern::sum_sq_diff_scalar(a, b)).epsilon(tol));
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants match scalar when supported") {
    if (!kern::using_avx2()) return;
    std::mt19937_64 gen(11);
    for (std::size_t n : {1, 6, 33, 257}) {
        auto a = random_vec(n, gen);
        auto b = random_vec(n, gen);
        double tol = 1e-12 * (1.0 + static_cast<double>(n));
        CHECK(kern::sum_avx2(a) == doctest::Approx(kern::sum_scalar(a)).epsilon(tol));
        CHECK(kern::dot_avx2(a, b) == doctest::Approx(kern::dot_scalar(a, b)).epsilon(tol));
        CHECK(kern::sum_abs_diff_avx2(a, b) ==
              doctest::Approx(kern::sum_abs_diff_scalar(a, b)).epsilon(tol));
        CHECK(kern::sum_sq_diff_avx2(a, b) ==
              doctest::Approx(kern::sum_sq_diff_scalar(a, b)).epsilon(tol));
    }
}
#endif
