#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace enhvi::kernels {

// Reduction kernels behind the aggregation paths. Scalar versions are
// the reference; the AVX2 variants must match them within summation
// reordering error and are selected once at startup.

namespace scalar {
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double max(std::span<const double> v);
double min(std::span<const double> v);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double max(std::span<const double> v);
double min(std::span<const double> v);
} // namespace avx2
#endif

struct Dispatch {
    double (*sum)(std::span<const double>);
    double (*dot)(std::span<const double>, std::span<const double>);
    double (*max)(std::span<const double>);
    double (*min)(std::span<const double>);
    const char* name;
};

/// Active kernel set, chosen once from CPU features (ENHVI_NO_SIMD=1
/// forces the scalar path).
const Dispatch& active();

inline double sum(std::span<const double> v) { return active().sum(v); }
inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a, b);
}
inline double max(std::span<const double> v) { return active().max(v); }
inline double min(std::span<const double> v) { return active().min(v); }

} // namespace enhvi::kernels
