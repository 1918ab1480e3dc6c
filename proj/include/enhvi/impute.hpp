#pragma once

#include "enhvi/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace enhvi {

/// Per-region linear interpolation between observed years across `span`,
/// held flat outside the observed range. Regions with no observations
/// stay fully missing. Observed years are never modified.
struct YearSpan {
    int start_year;
    int end_year;
};

VariablePanel interpolate_annual(const VariablePanel& panel, YearSpan span);

/// Copies each (region, year) value to every month or ISO week of that
/// year (weeks belong to their ISO year, so a year may carry 52 or 53).
VariablePanel broadcast(const VariablePanel& panel, Resolution target);

struct MultipleImputeResult {
    std::vector<std::vector<double>> completed;  // m vectors
    std::vector<double> mean;                    // elementwise mean over m
};

/// Fills each missing entry with a seeded draw (with replacement) from the
/// observed entries; the mean over m draws converges to plain mean-fill.
/// Throws when every entry is missing.
MultipleImputeResult multiple_impute_percentiles(
    const std::vector<std::optional<double>>& values, int m, std::uint64_t seed);

} // namespace enhvi
