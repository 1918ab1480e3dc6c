#include "enhvi/indicators.hpp"

#include "enhvi/io.hpp"
#include "enhvi/kernels.hpp"
#include "enhvi/stats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace enhvi {

void DailyTempSeries::set(const RegionId& r, const Date& d, std::optional<double> tmax,
                          std::optional<double> tmin) {
    if (tmax && tmin && *tmax < *tmin)
        throw std::runtime_error("daily temps: tmax < tmin for region '" + r.code + "' on " +
                                 format_iso_date(d));
    values[{r, days_from_civil(d)}] = Obs{tmax, tmin};
}

const DailyTempSeries::Obs* DailyTempSeries::find(const RegionId& r, std::int64_t day) const {
    auto it = values.find({r, day});
    return it == values.end() ? nullptr : &it->second;
}

std::vector<RegionId> DailyTempSeries::regions() const {
    std::set<RegionId> seen;
    for (const auto& [k, v] : values) seen.insert(k.first);
    return {seen.begin(), seen.end()};
}

DailyTempSeries read_daily_temps_csv(const std::filesystem::path& path, Level level) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || (line != "region_code,date,tmax,tmin" &&
                                    line != "region_code,date,tmax,tmin\r"))
        throw std::runtime_error(path.string() + ": bad header, expected region_code,date,tmax,tmin");
    DailyTempSeries series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string field;
        for (char c : line) {
            if (c == ',') {
                f.push_back(field);
                field.clear();
            } else {
                field.push_back(c);
            }
        }
        f.push_back(field);
        if (f.size() != 4)
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                     ": expected 4 fields");
        auto parse = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            double v = 0.0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || p != s.data() + s.size())
                throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                         ": not a number: '" + s + "'");
            return v;
        };
        series.set(RegionId{f[0], level}, parse_iso_date(f[1]), parse(f[2]), parse(f[3]));
    }
    return series;
}

void write_daily_temps_csv(const DailyTempSeries& series, Level level,
                           const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "region_code,date,tmax,tmin\n";
    for (const auto& [key, obs] : series.values) {
        if (key.first.level != level) continue;
        out << key.first.code << ',' << format_iso_date(civil_from_days(key.second)) << ','
            << (obs.tmax ? io::format_value(*obs.tmax) : std::string()) << ','
            << (obs.tmin ? io::format_value(*obs.tmin) : std::string()) << '\n';
    }
}

std::optional<double> daily_mean_temp(const DailyTempSeries& series, const RegionId& r,
                                      std::int64_t day, DailyMeanRule rule) {
    const auto* obs = series.find(r, day);
    if (!obs || !obs->tmax) return std::nullopt;
    std::optional<double> tmin;
    if (rule == DailyMeanRule::SameDayMin) {
        tmin = obs->tmin;
    } else {
        const auto* next = series.find(r, day + 1);
        if (next) tmin = next->tmin;
    }
    if (!tmin) return std::nullopt;
    return (*obs->tmax + *tmin) / 2.0;
}

const ClimatologyStore::RegionClim* ClimatologyStore::find(const RegionId& r) const {
    auto it = regions.find(r);
    return it == regions.end() ? nullptr : &it->second;
}

ClimatologyStore build_climatology(const DailyTempSeries& series,
                                   const ClimatologyParams& params) {
    ClimatologyStore store;
    store.params = params;
    const std::int64_t first = days_from_civil({params.baseline_start_year, 1, 1});
    const std::int64_t last = days_from_civil({params.baseline_end_year, 12, 31});

    // Inverse of empirical_percentile's plotting position: value at the
    // requested fraction, nearest-rank on the sorted sample.
    auto quantile = [](const std::vector<double>& sorted, double q) {
        const std::size_t n = sorted.size();
        auto idx = static_cast<std::size_t>(q * static_cast<double>(n));
        if (idx >= n) idx = n - 1;
        return sorted[idx];
    };

    for (const auto& region : series.regions()) {
        std::vector<double> sample;
        for (std::int64_t d = first; d <= last; ++d) {
            if (auto m = daily_mean_temp(series, region, d, params.mean_rule)) {
                sample.push_back(*m);
            }
        }
        if (sample.empty()) {
            store.diagnostics.push_back("region '" + region.code +
                                        "': no daily means in baseline window, omitted");
            continue;
        }
        std::sort(sample.begin(), sample.end());
        ClimatologyStore::RegionClim clim;
        clim.hot_threshold = quantile(sample, params.hot_percentile);
        clim.cold_threshold = quantile(sample, params.cold_percentile);
        clim.sorted_daily_means = std::move(sample);
        store.regions.emplace(region, std::move(clim));
    }
    return store;
}

namespace {

// Windowed means for the EHF/ECF construction: the event window must be
// fully observed, the acclimatisation window fully observed as well.
struct Windows {
    double event_mean;
    double accl_mean;
};

std::optional<Windows> window_means(const DailyTempSeries& series, const ClimatologyParams& p,
                                    const RegionId& r, std::int64_t day) {
    std::vector<double> ev;
    for (int i = 0; i < p.event_window_days; ++i) {
        auto m = daily_mean_temp(series, r, day - i, p.mean_rule);
        if (!m) return std::nullopt;
        ev.push_back(*m);
    }
    std::vector<double> accl;
    for (int i = p.event_window_days; i < p.event_window_days + p.acclimatisation_days; ++i) {
        auto m = daily_mean_temp(series, r, day - i, p.mean_rule);
        if (!m) return std::nullopt;
        accl.push_back(*m);
    }
    return Windows{kernels::sum(ev) / static_cast<double>(ev.size()),
                   kernels::sum(accl) / static_cast<double>(accl.size())};
}

} // namespace

std::optional<double> ehf(const DailyTempSeries& series, const ClimatologyStore& clim,
                          const RegionId& r, std::int64_t day) {
    const auto* rc = clim.find(r);
    if (!rc) return std::nullopt;
    auto w = window_means(series, clim.params, r, day);
    if (!w) return std::nullopt;
    const double sig = w->event_mean - rc->hot_threshold;
    const double accl = w->event_mean - w->accl_mean;
    return std::max(0.0, sig) * std::max(1.0, accl);
}

std::optional<double> ecf(const DailyTempSeries& series, const ClimatologyStore& clim,
                          const RegionId& r, std::int64_t day) {
    const auto* rc = clim.find(r);
    if (!rc) return std::nullopt;
    auto w = window_means(series, clim.params, r, day);
    if (!w) return std::nullopt;
    const double sig = w->event_mean - rc->cold_threshold;
    const double accl = w->event_mean - w->accl_mean;
    return std::min(0.0, sig) * std::min(-1.0, accl);
}

std::optional<double> historical_percentile(const DailyTempSeries& series,
                                            const ClimatologyStore& clim, const RegionId& r,
                                            std::int64_t day, PercentileMode mode) {
    const auto* rc = clim.find(r);
    if (!rc) return std::nullopt;
    auto m = daily_mean_temp(series, r, day, clim.params.mean_rule);
    if (!m) return std::nullopt;
    const double p = stats::empirical_percentile(rc->sorted_daily_means, *m);
    return mode == PercentileMode::Heat ? p : 1.0 - p;
}

VariablePanel temporal_aggregate(
    const std::map<std::pair<RegionId, std::int64_t>, std::optional<double>>& daily,
    Resolution target, AggRule rule, const std::string& variable_id) {
    if (target == Resolution::Daily)
        throw std::invalid_argument("temporal_aggregate: target must be coarser than daily");
    VariablePanel panel;
    panel.variable_id = variable_id;
    panel.resolution = target;

    std::map<PanelKey, std::vector<double>> buckets;
    for (const auto& [key, value] : daily) {
        const Date d = civil_from_days(key.second);
        TimeKey t;
        t.resolution = target;
        switch (target) {
        case Resolution::Yearly:
            t.year = d.year;
            t.sub = 0;
            break;
        case Resolution::Monthly:
            t.year = d.year;
            t.sub = d.month;
            break;
        case Resolution::Weekly: {
            const IsoWeek w = iso_week_of(d);
            t.year = w.year;
            t.sub = w.week;
            break;
        }
        case Resolution::Daily:
            break;
        }
        auto& bucket = buckets[PanelKey{key.first, t}];
        if (value) bucket.push_back(*value);
    }

    for (const auto& [key, vals] : buckets) {
        std::optional<double> out;
        if (!vals.empty()) {
            out = rule == AggRule::Mean ? kernels::sum(vals) / static_cast<double>(vals.size())
                                        : kernels::max(vals);
        }
        panel.values[key] = out;
    }
    return panel;
}

} // namespace enhvi
