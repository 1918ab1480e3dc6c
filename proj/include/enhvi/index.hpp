#pragma once

#include "enhvi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enhvi {

struct MissingPolicy {
    enum class Kind { Propagate, MeanFill, MultipleImpute };
    Kind kind = Kind::MeanFill;
    int m = 5;                // multiple-impute draws
    std::uint64_t seed = 0;   // multiple-impute seed

    static MissingPolicy propagate() { return {Kind::Propagate, 0, 0}; }
    static MissingPolicy mean_fill() { return {Kind::MeanFill, 0, 0}; }
    static MissingPolicy multiple_impute(int m, std::uint64_t seed) {
        return {Kind::MultipleImpute, m, seed};
    }
};

/// Everything one index build needs: the spec, one panel per variable
/// (all at one level and resolution), and optionally a weight table.
struct BuildContext {
    IndexSpec spec;
    std::map<std::string, VariablePanel> panels;
    std::optional<WeightTable> weights;
    MissingPolicy missing_policy;

    void validate() const;  // throws when a spec variable has no panel
    std::vector<RegionId> region_universe() const;
    std::vector<TimeKey> time_universe() const;
};

/// Negates risk-decreasing values so a higher spatial percentile always
/// reads as more vulnerable.
VariablePanel apply_polarity(const VariablePanel& panel, Polarity polarity);

/// Unnormalized rank-sum sub-index: sum of variable spatial percentiles,
/// themes flattened.
std::map<RegionId, std::optional<double>> equal_sum_subindex(const BuildContext& ctx,
                                                             SubIndexKind kind,
                                                             const TimeKey& t);

/// Theme-normalized sub-index: per-theme mean of variable percentiles,
/// re-percentiled across regions, averaged over the themes usable at t.
/// With `weighted`, each variable percentile is scaled by its weight first.
std::map<RegionId, std::optional<double>> themed_subindex(const BuildContext& ctx,
                                                          SubIndexKind kind, const TimeKey& t,
                                                          bool weighted,
                                                          std::vector<std::string>* diagnostics
                                                          = nullptr);

/// Full build, dispatching on ctx.spec.method. Stores sub-index scores,
/// theme scores and variable percentiles for breakdown reports.
IndexResult build_index(const BuildContext& ctx);

/// Kendall's Tau of each sensitivity / adaptive-capacity variable against
/// the mortality category rates, pooled over the mortality period (regions
/// are matched, values averaged over time first). Exposure weights are
/// always exactly 1; undefined correlations become 0 with a diagnostic.
WeightTable compute_weights(const BuildContext& ctx, const VariablePanel& mortality,
                            MortalityCategory category);

struct BreakdownReport {
    std::string index_id;
    IndexMethod method;
    RegionId region;
    TimeKey time;
    std::optional<double> overall;

    struct SubEntry {
        SubIndexKind kind;
        std::optional<double> percentile;
        std::optional<double> raw_score;
    };
    std::vector<SubEntry> sub_indices;

    struct ThemeEntry {
        SubIndexKind kind;
        std::string theme_id;
        std::optional<double> score;
    };
    std::vector<ThemeEntry> themes;

    struct VariableEntry {
        SubIndexKind kind;
        std::string theme_id;
        std::string variable_id;
        std::optional<double> percentile;  // polarity-adjusted
        bool above_median = false;         // >= 0.5
    };
    std::vector<VariableEntry> variables;

    double reconstruction_error = 0.0;  // |overall - recomputed|
};

/// Region/time drill-down mirroring the index composition; throws on an
/// unknown (region, time) and reports the reconstruction error against
/// the stored overall value.
BreakdownReport breakdown(const IndexResult& result, const BuildContext& ctx,
                          const RegionId& region, const TimeKey& time);

// Exports
void write_index_result_csv(const IndexResult& result, Level level,
                            const std::filesystem::path& path);
void write_geojson_join(const IndexResult& result, const TimeKey& time,
                        const std::filesystem::path& path);
void write_breakdown_json(const BreakdownReport& report, const std::filesystem::path& path);

} // namespace enhvi
