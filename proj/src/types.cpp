#include "enhvi/types.hpp"

#include <algorithm>
#include <charconv>
#include <set>

namespace enhvi {

std::string to_string(Level level) {
    switch (level) {
    case Level::SA2: return "sa2";
    case Level::SA3: return "sa3";
    case Level::SA4: return "sa4";
    case Level::LGA: return "lga";
    }
    throw std::logic_error("bad Level");
}

Level level_from_string(const std::string& s) {
    if (s == "sa2" || s == "SA2") return Level::SA2;
    if (s == "sa3" || s == "SA3") return Level::SA3;
    if (s == "sa4" || s == "SA4") return Level::SA4;
    if (s == "lga" || s == "LGA") return Level::LGA;
    throw std::runtime_error("unknown geographic level: '" + s + "'");
}

std::string to_string(Resolution res) {
    switch (res) {
    case Resolution::Yearly: return "yearly";
    case Resolution::Monthly: return "monthly";
    case Resolution::Weekly: return "weekly";
    case Resolution::Daily: return "daily";
    }
    throw std::logic_error("bad Resolution");
}

Resolution resolution_from_string(const std::string& s) {
    if (s == "yearly") return Resolution::Yearly;
    if (s == "monthly") return Resolution::Monthly;
    if (s == "weekly") return Resolution::Weekly;
    if (s == "daily") return Resolution::Daily;
    throw std::runtime_error("unknown resolution: '" + s + "'");
}

bool TimeKey::valid() const {
    switch (resolution) {
    case Resolution::Yearly: return sub == 0;
    case Resolution::Monthly: return sub >= 1 && sub <= 12;
    case Resolution::Weekly: return sub >= 1 && sub <= 53;
    case Resolution::Daily: return sub >= 1 && sub <= 366;
    }
    return false;
}

std::vector<RegionId> VariablePanel::regions() const {
    std::set<RegionId> seen;
    for (const auto& [k, v] : values) seen.insert(k.region);
    return {seen.begin(), seen.end()};
}

std::vector<TimeKey> VariablePanel::times() const {
    std::set<std::pair<int, int>> seen;
    std::vector<TimeKey> out;
    for (const auto& [k, v] : values) {
        if (seen.insert({k.time.year, k.time.sub}).second) out.push_back(k.time);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<double> VariablePanel::at(const RegionId& r, const TimeKey& t) const {
    auto it = values.find(PanelKey{r, t});
    if (it == values.end()) return std::nullopt;
    return it->second;
}

std::string to_string(SubIndexKind k) {
    switch (k) {
    case SubIndexKind::Exposure: return "exposure";
    case SubIndexKind::Sensitivity: return "sensitivity";
    case SubIndexKind::AdaptiveCapacity: return "adaptive_capacity";
    }
    throw std::logic_error("bad SubIndexKind");
}

SubIndexKind sub_index_kind_from_string(const std::string& s) {
    if (s == "exposure") return SubIndexKind::Exposure;
    if (s == "sensitivity") return SubIndexKind::Sensitivity;
    if (s == "adaptive_capacity") return SubIndexKind::AdaptiveCapacity;
    throw std::runtime_error("unknown sub-index kind: '" + s + "'");
}

std::string to_string(IndexMethod m) {
    switch (m) {
    case IndexMethod::EqualSum: return "equal_sum";
    case IndexMethod::EqualThemed: return "equal_themed";
    case IndexMethod::Weighted: return "weighted";
    }
    throw std::logic_error("bad IndexMethod");
}

IndexMethod index_method_from_string(const std::string& s) {
    if (s == "equal_sum") return IndexMethod::EqualSum;
    if (s == "equal_themed") return IndexMethod::EqualThemed;
    if (s == "weighted") return IndexMethod::Weighted;
    throw std::runtime_error("unknown index method: '" + s + "'");
}

std::string to_string(MortalityCategory c) {
    switch (c) {
    case MortalityCategory::Heat: return "heat";
    case MortalityCategory::AirQuality: return "air_quality";
    case MortalityCategory::AllCause: return "all_cause";
    }
    throw std::logic_error("bad MortalityCategory");
}

MortalityCategory mortality_category_from_string(const std::string& s) {
    if (s == "heat") return MortalityCategory::Heat;
    if (s == "air_quality") return MortalityCategory::AirQuality;
    if (s == "all_cause") return MortalityCategory::AllCause;
    throw std::runtime_error("unknown mortality category: '" + s + "'");
}

const SubIndexSpec& IndexSpec::sub_index(SubIndexKind k) const {
    for (const auto& s : sub_indices) {
        if (s.kind == k) return s;
    }
    throw std::runtime_error("index '" + index_id + "' lacks sub-index " + to_string(k));
}

std::vector<std::string> IndexSpec::all_variable_ids() const {
    std::vector<std::string> out;
    for (const auto& s : sub_indices)
        for (const auto& t : s.themes)
            for (const auto& [vid, pol] : t.variables) out.push_back(vid);
    return out;
}

Polarity IndexSpec::polarity_of(const std::string& variable_id) const {
    for (const auto& s : sub_indices)
        for (const auto& t : s.themes)
            for (const auto& [vid, pol] : t.variables)
                if (vid == variable_id) return pol;
    throw std::runtime_error("variable '" + variable_id + "' not in index '" + index_id + "'");
}

void IndexSpec::validate() const {
    if (index_id.empty()) throw std::runtime_error("index_id is empty");
    if (sub_indices.size() != 3)
        throw std::runtime_error("index '" + index_id + "' must have exactly 3 sub-indices");
    std::set<SubIndexKind> kinds;
    for (const auto& s : sub_indices) {
        if (!kinds.insert(s.kind).second)
            throw std::runtime_error("index '" + index_id + "' repeats sub-index " + to_string(s.kind));
        if (s.themes.empty())
            throw std::runtime_error("sub-index " + to_string(s.kind) + " has no themes");
        for (const auto& t : s.themes) {
            if (t.variables.empty())
                throw std::runtime_error("theme '" + t.theme_id + "' has no variables");
            std::set<std::string> ids;
            for (const auto& [vid, pol] : t.variables)
                if (!ids.insert(vid).second)
                    throw std::runtime_error("theme '" + t.theme_id + "' repeats variable '" + vid + "'");
        }
    }
}

double WeightTable::at(const std::string& variable_id, const std::string& theme_id,
                       SubIndexKind k) const {
    auto it = entries.find(WeightKey{variable_id, theme_id, k});
    if (it == entries.end())
        throw std::runtime_error("no weight for variable '" + variable_id + "' in theme '" +
                                 theme_id + "'");
    return it->second;
}

std::vector<std::string> validate_panel(const VariablePanel& panel) {
    std::vector<std::string> out;
    std::optional<Level> level;
    for (const auto& [key, value] : panel.values) {
        if (key.region.code.empty()) out.push_back("empty region code");
        if (!level) {
            level = key.region.level;
        } else if (key.region.level != *level) {
            out.push_back("mixed geographic level: region '" + key.region.code + "' is " +
                          to_string(key.region.level) + ", panel is " + to_string(*level));
        }
        if (key.time.resolution != panel.resolution)
            out.push_back("TimeKey resolution mismatch for region '" + key.region.code + "'");
        if (!key.time.valid())
            out.push_back("TimeKey out of range: year=" + std::to_string(key.time.year) +
                          " sub=" + std::to_string(key.time.sub) + " at " +
                          to_string(key.time.resolution) + " resolution");
    }
    return out;
}

// Howard Hinnant's civil-date algorithms.
std::int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
                static_cast<int>(day)};
}

int weekday_iso(const Date& d) {
    const std::int64_t z = days_from_civil(d);
    // 1970-01-01 was a Thursday (ISO 4).
    const std::int64_t w = (z % 7 + 7 + 3) % 7;  // Mon=0
    return static_cast<int>(w) + 1;
}

bool is_leap(int year) {
    return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_month(int year, int month) {
    static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month == 2 && is_leap(year)) return 29;
    return lengths[month - 1];
}

int day_of_year(const Date& d) {
    int doy = d.day;
    for (int m = 1; m < d.month; ++m) doy += days_in_month(d.year, m);
    return doy;
}

IsoWeek iso_week_of(const Date& d) {
    // Week containing the date's Thursday determines the ISO year.
    const std::int64_t z = days_from_civil(d);
    const std::int64_t thursday = z + (4 - weekday_iso(d));
    const Date th = civil_from_days(thursday);
    const std::int64_t jan1 = days_from_civil(Date{th.year, 1, 1});
    const int week = static_cast<int>((thursday - jan1) / 7) + 1;
    return IsoWeek{th.year, week};
}

int iso_weeks_in_year(int iso_year) {
    // 53-week years: those whose Jan 1 or Dec 31 is a Thursday.
    const int wd_jan1 = weekday_iso(Date{iso_year, 1, 1});
    const int wd_dec31 = weekday_iso(Date{iso_year, 12, 31});
    return (wd_jan1 == 4 || wd_dec31 == 4) ? 53 : 52;
}

Date parse_iso_date(const std::string& s) {
    Date d;
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw std::runtime_error("bad ISO date: '" + s + "'");
    auto num = [&](int from, int to) {
        int v = 0;
        auto [p, ec] = std::from_chars(s.data() + from, s.data() + to, v);
        if (ec != std::errc() || p != s.data() + to)
            throw std::runtime_error("bad ISO date: '" + s + "'");
        return v;
    };
    d.year = num(0, 4);
    d.month = num(5, 7);
    d.day = num(8, 10);
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw std::runtime_error("bad ISO date: '" + s + "'");
    return d;
}

std::string format_iso_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

} // namespace enhvi
