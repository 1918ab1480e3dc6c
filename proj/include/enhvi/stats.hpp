#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace enhvi::stats {

/// Spatial percentile f_i: rank each non-missing entry ascending with
/// average ranks for ties, map to (rank-1)/(N-1). A single non-missing
/// entry maps to 0.5. Missing in, missing out.
std::vector<std::optional<double>> spatial_percentile(
    std::span<const std::optional<double>> values);

/// Percentile of x within a sorted, non-empty sample:
/// (count below + half the count equal) / size.
double empirical_percentile(std::span<const double> sorted_sample, double x);

/// Kendall's tau-b over complete pairs (pairs with a missing member are
/// dropped). Throws UndefinedCorrelation when fewer than two complete
/// pairs remain or either remaining vector is constant.
struct UndefinedCorrelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double kendall_tau(std::span<const std::optional<double>> x,
                   std::span<const std::optional<double>> y);
double kendall_tau(std::span<const double> x, std::span<const double> y);

} // namespace enhvi::stats
