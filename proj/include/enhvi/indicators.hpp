#pragma once

#include "enhvi/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enhvi {

/// Daily tmax/tmin per (region, date); either side may be missing.
struct DailyTempSeries {
    struct Obs {
        std::optional<double> tmax;
        std::optional<double> tmin;
    };
    std::map<std::pair<RegionId, std::int64_t>, Obs> values;  // day number from days_from_civil

    void set(const RegionId& r, const Date& d, std::optional<double> tmax,
             std::optional<double> tmin);
    const Obs* find(const RegionId& r, std::int64_t day) const;
    std::vector<RegionId> regions() const;
};

// CSV: region_code,date,tmax,tmin (ISO dates, empty field = missing)
DailyTempSeries read_daily_temps_csv(const std::filesystem::path& path, Level level);
void write_daily_temps_csv(const DailyTempSeries& series, Level level,
                           const std::filesystem::path& path);

enum class DailyMeanRule { SameDayMin, NextDayMin };

/// (tmax + tmin)/2; missing when either side is missing. NextDayMin pairs
/// tmax with the following day's tmin.
std::optional<double> daily_mean_temp(const DailyTempSeries& series, const RegionId& r,
                                      std::int64_t day,
                                      DailyMeanRule rule = DailyMeanRule::SameDayMin);

struct ClimatologyParams {
    int baseline_start_year = 2000;
    int baseline_end_year = 2020;
    double hot_percentile = 0.95;
    double cold_percentile = 0.05;
    int event_window_days = 3;
    int acclimatisation_days = 30;
    DailyMeanRule mean_rule = DailyMeanRule::SameDayMin;
};

/// Per-region sorted historical daily-mean samples with cached hot/cold
/// thresholds (T95/T05 by default).
struct ClimatologyStore {
    struct RegionClim {
        std::vector<double> sorted_daily_means;
        double hot_threshold;   // e.g. T95
        double cold_threshold;  // e.g. T05
    };
    ClimatologyParams params;
    std::map<RegionId, RegionClim> regions;
    std::vector<std::string> diagnostics;

    const RegionClim* find(const RegionId& r) const;
};

ClimatologyStore build_climatology(const DailyTempSeries& series, const ClimatologyParams& params);

/// Excess heat factor at `day`: max(0, T3 - hot_threshold) * max(1, T3 - accl_mean),
/// in degC^2. Missing when the event window or the acclimatisation window
/// is not fully observed.
std::optional<double> ehf(const DailyTempSeries& series, const ClimatologyStore& clim,
                          const RegionId& r, std::int64_t day);

/// Excess cold factor: min(0, T3 - cold_threshold) * min(-1, T3 - accl_mean),
/// non-negative wherever defined.
std::optional<double> ecf(const DailyTempSeries& series, const ClimatologyStore& clim,
                          const RegionId& r, std::int64_t day);

enum class PercentileMode { Heat, Cold };

/// Day's daily-mean temperature ranked within the region's own baseline
/// sample; Cold returns the complement so higher always means more exposed.
std::optional<double> historical_percentile(const DailyTempSeries& series,
                                            const ClimatologyStore& clim, const RegionId& r,
                                            std::int64_t day, PercentileMode mode);

enum class AggRule { Mean, Max };

/// Collapses per-region daily values into weekly/monthly/yearly panels.
/// Weeks are ISO weeks assigned to their ISO year.
VariablePanel temporal_aggregate(
    const std::map<std::pair<RegionId, std::int64_t>, std::optional<double>>& daily,
    Resolution target, AggRule rule, const std::string& variable_id);

} // namespace enhvi
