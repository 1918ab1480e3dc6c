#include "enhvi/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace enhvi;

TEST_CASE("dispatched kernels match the scalar reference") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::uniform_int_distribution<int> len(0, 200);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = len(rng);
        std::vector<double> a(n), b(n);
        for (int i = 0; i < n; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        const double tol = 1e-9 * (1.0 + n);
        CHECK(std::abs(kernels::sum(a) - kernels::scalar::sum(a)) < tol);
        CHECK(std::abs(kernels::dot(a, b) - kernels::scalar::dot(a, b)) < tol * 100);
        if (n > 0) {
            // min/max are order statistics: exact regardless of lane order
            CHECK(kernels::max(a) == kernels::scalar::max(a));
            CHECK(kernels::min(a) == kernels::scalar::min(a));
        }
    }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with scalar when the CPU has them") {
    if (!__builtin_cpu_supports("avx2")) return;
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> v(1 + trial);
        for (auto& x : v) x = u(rng);
        CHECK(std::abs(kernels::avx2::sum(v) - kernels::scalar::sum(v)) < 1e-10);
        CHECK(kernels::avx2::max(v) == kernels::scalar::max(v));
        CHECK(kernels::avx2::min(v) == kernels::scalar::min(v));
        CHECK(std::abs(kernels::avx2::dot(v, v) - kernels::scalar::dot(v, v)) < 1e-10);
    }
}
#endif

TEST_CASE("kernel selection reports a backend") {
    CHECK(kernels::active().name != nullptr);
}
