#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace enhvi {

enum class Level { SA2, SA3, SA4, LGA };
enum class Resolution { Yearly, Monthly, Weekly, Daily };

std::string to_string(Level level);
std::string to_string(Resolution res);
Level level_from_string(const std::string& s);
Resolution resolution_from_string(const std::string& s);

/// Opaque region code plus its ASGS/LGA level.
struct RegionId {
    std::string code;
    Level level = Level::SA2;

    auto operator<=>(const RegionId&) const = default;
};

/// One period at a given temporal resolution. `sub` is 0 for yearly,
/// month 1-12, ISO week 1-53, or day-of-year 1-366. Ordering is by
/// (year, sub) only; panels never mix resolutions.
struct TimeKey {
    Resolution resolution = Resolution::Yearly;
    int year = 0;
    int sub = 0;

    bool valid() const;

    friend bool operator==(const TimeKey& a, const TimeKey& b) {
        return a.year == b.year && a.sub == b.sub;
    }
    friend std::strong_ordering operator<=>(const TimeKey& a, const TimeKey& b) {
        if (auto c = a.year <=> b.year; c != 0) return c;
        return a.sub <=> b.sub;
    }
};

struct PanelKey {
    RegionId region;
    TimeKey time;

    friend bool operator<(const PanelKey& a, const PanelKey& b) {
        if (a.region != b.region) return a.region < b.region;
        return a.time < b.time;
    }
};

/// One variable's values over (region, time). Missingness is explicit:
/// an entry with std::nullopt is a recorded missing observation.
struct VariablePanel {
    std::string variable_id;
    std::string unit;
    Resolution resolution = Resolution::Yearly;
    std::map<PanelKey, std::optional<double>> values;

    std::vector<RegionId> regions() const;
    std::vector<TimeKey> times() const;
    std::optional<double> at(const RegionId& r, const TimeKey& t) const;
};

enum class PolarityDir { RiskIncreasing, RiskDecreasing };

struct Polarity {
    PolarityDir direction = PolarityDir::RiskIncreasing;
};

struct ThemeSpec {
    std::string theme_id;
    std::vector<std::pair<std::string, Polarity>> variables;
};

enum class SubIndexKind { Exposure, Sensitivity, AdaptiveCapacity };

std::string to_string(SubIndexKind k);
SubIndexKind sub_index_kind_from_string(const std::string& s);

struct SubIndexSpec {
    SubIndexKind kind = SubIndexKind::Exposure;
    std::vector<ThemeSpec> themes;
};

enum class IndexMethod { EqualSum, EqualThemed, Weighted };

std::string to_string(IndexMethod m);
IndexMethod index_method_from_string(const std::string& s);

/// Declarative index description: exactly one sub-index per kind,
/// in the order exposure, sensitivity, adaptive capacity.
struct IndexSpec {
    std::string index_id;
    std::vector<SubIndexSpec> sub_indices;
    IndexMethod method = IndexMethod::EqualThemed;

    const SubIndexSpec& sub_index(SubIndexKind k) const;
    std::vector<std::string> all_variable_ids() const;
    Polarity polarity_of(const std::string& variable_id) const;
    void validate() const;
};

enum class MortalityCategory { Heat, AirQuality, AllCause };

std::string to_string(MortalityCategory c);
MortalityCategory mortality_category_from_string(const std::string& s);

struct WeightKey {
    std::string variable_id;
    std::string theme_id;
    SubIndexKind sub_index = SubIndexKind::Exposure;

    friend bool operator<(const WeightKey& a, const WeightKey& b) {
        if (a.variable_id != b.variable_id) return a.variable_id < b.variable_id;
        if (a.theme_id != b.theme_id) return a.theme_id < b.theme_id;
        return a.sub_index < b.sub_index;
    }
};

/// Kendall's Tau weights per (variable, theme, sub-index); exposure
/// entries are always exactly 1.
struct WeightTable {
    MortalityCategory mortality_category = MortalityCategory::AllCause;
    std::map<WeightKey, double> entries;
    std::vector<std::string> diagnostics;

    double at(const std::string& variable_id, const std::string& theme_id,
              SubIndexKind k) const;
};

///// Per-(region, time) scores for one built index: the overall percentile,
/// the three sub-index percentiles, theme scores and variable percentiles
/// retained for breakdown reports.
struct IndexCell {
    std::optional<double> overall;
    std::optional<double> sub_percentile[3];   // indexed by SubIndexKind
    std::optional<double> sub_raw[3];          // pre-rank sub-index score
    std::map<std::string, std::optional<double>> theme_scores;     // "kind/theme_id"
    std::map<std::string, std::optional<double>> variable_percentiles;
};

struct IndexResult {
    std::string index_id;
    IndexMethod method = IndexMethod::EqualThemed;
    Resolution resolution = Resolution::Yearly;
    std::map<PanelKey, IndexCell> cells;
    std::vector<std::string> diagnostics;
};

/// Non-fatal validation findings; empty means all invariants hold.
std::vector<std::string> validate_panel(const VariablePanel& panel);

// ---- calendar helpers (proleptic Gregorian) ----

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;
};

std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t z);
int weekday_iso(const Date& d);                 // Mon=1 .. Sun=7
int days_in_month(int year, int month);
int day_of_year(const Date& d);
bool is_leap(int year);
struct IsoWeek { int year; int week; };
IsoWeek iso_week_of(const Date& d);
int iso_weeks_in_year(int iso_year);
Date parse_iso_date(const std::string& s);
std::string format_iso_date(const Date& d);

} // namespace enhvi
