#include "enhvi/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

namespace enhvi::kernels {

namespace scalar {

double sum(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double max(std::span<const double> v) {
    assert(!v.empty());
    double m = v[0];
    for (double x : v.subspan(1)) m = std::max(m, x);
    return m;
}

double min(std::span<const double> v) {
    assert(!v.empty());
    double m = v[0];
    for (double x : v.subspan(1)) m = std::min(m, x);
    return m;
}

} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {

__attribute__((target("avx2"))) double sum(std::span<const double> v) {
    const std::size_t n = v.size();
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v.data() + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += v[i];
    return total;
}

__attribute__((target("avx2"))) double dot(std::span<const double> a,
                                           std::span<const double> b) {
    assert(a.size() == b.size());
    const std::size_t n = a.size();
    std::size_t i = 0;
    __m256d acc = _mm256_setzero_pd();
    for (; i + 4 <= n; i += 4) {
        const __m256d prod =
            _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
        acc = _mm256_add_pd(acc, prod);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

__attribute__((target("avx2"))) double max(std::span<const double> v) {
    assert(!v.empty());
    const std::size_t n = v.size();
    if (n < 4) return scalar::max(v);
    __m256d acc = _mm256_loadu_pd(v.data());
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(v.data() + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = std::max(std::max(lanes[0], lanes[1]), std::max(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::max(m, v[i]);
    return m;
}

__attribute__((target("avx2"))) double min(std::span<const double> v) {
    assert(!v.empty());
    const std::size_t n = v.size();
    if (n < 4) return scalar::min(v);
    __m256d acc = _mm256_loadu_pd(v.data());
    std::size_t i = 4;
    for (; i + 4 <= n; i += 4) acc = _mm256_min_pd(acc, _mm256_loadu_pd(v.data() + i));
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double m = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
    for (; i < n; ++i) m = std::min(m, v[i]);
    return m;
}

} // namespace avx2
#endif

namespace {

const Dispatch kScalar{scalar::sum, scalar::dot, scalar::max, scalar::min, "scalar"};
#if defined(__x86_64__) || defined(_M_X64)
const Dispatch kAvx2{avx2::sum, avx2::dot, avx2::max, avx2::min, "avx2"};
#endif

const Dispatch& select() {
    if (const char* env = std::getenv("ENHVI_NO_SIMD"); env && env[0] == '1') return kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return kAvx2;
#endif
    return kScalar;
}

} // namespace

const Dispatch& active() {
    static const Dispatch& chosen = select();
    return chosen;
}

} // namespace enhvi::kernels
