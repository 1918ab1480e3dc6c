#pragma once

#include "enhvi/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enhvi {

/// Precomputed grid-cell to region overlap weights. Per region, the
/// weights over its cells sum to 1 (checked on load).
struct CellWeightTable {
    struct Entry {
        std::string cell_id;
        RegionId region;
        double weight;
    };
    std::vector<Entry> entries;

    void validate() const;  // throws on weight-sum violations
};

/// Gridded values keyed by opaque cell id and time.
struct GridSeries {
    Resolution resolution = Resolution::Daily;
    std::map<std::pair<std::string, TimeKey>, std::optional<double>> values;
};

/// Age-standardised mortality rates per (region, cause) over a named
/// multi-year period.
struct MortalityTable {
    struct Entry {
        RegionId region;
        std::string cause;
        int period_start;
        int period_end;
        double rate;
    };
    std::vector<Entry> entries;
};

/// Parent-region mapping used to push SA3 mortality down to the build level.
using RegionMapping = std::map<RegionId, RegionId>;  // target -> source

struct ZonalResult {
    VariablePanel panel;
    std::vector<std::string> diagnostics;
};

/// Weighted mean of non-missing cell values per (region, time), weights
/// renormalized over the non-missing cells. Missing iff every cell is
/// missing at that time.
ZonalResult zonal_aggregate(const GridSeries& grid, const CellWeightTable& weights,
                            const std::string& variable_id);

/// Collapses raw causes into the category rate: heat sums the four
/// cardiovascular causes, air_quality is COPD, all_cause passes through.
/// Output is keyed yearly at the period start year. Regions lacking a
/// required cause come out missing.
VariablePanel mortality_category_rates(const MortalityTable& table, MortalityCategory category);

/// Replicates each target region's mapped parent value. When `targets`
/// is given, unmapped target regions come out explicitly missing.
VariablePanel crosswalk_to_level(const VariablePanel& panel, const RegionMapping& mapping,
                                 Level target_level,
                                 const std::vector<RegionId>& targets = {});

// Cause names as they appear in mortality files.
inline constexpr const char* kCauseCoronaryHeartDisease = "coronary_heart_disease";
inline constexpr const char* kCauseCerebrovascularDisease = "cerebrovascular_disease";
inline constexpr const char* kCauseHeartFailure = "heart_failure";
inline constexpr const char* kCauseCardiacArrhythmia = "cardiac_arrhythmia";
inline constexpr const char* kCauseCopd = "copd";
inline constexpr const char* kCauseAllCause = "all_cause";

} // namespace enhvi
