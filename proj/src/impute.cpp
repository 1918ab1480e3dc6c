#include "enhvi/impute.hpp"

#include <algorithm>
#include <map>
#include <random>

namespace enhvi {

VariablePanel interpolate_annual(const VariablePanel& panel, YearSpan span) {
    if (panel.resolution != Resolution::Yearly)
        throw std::invalid_argument("interpolate_annual: panel must be yearly");
    if (span.start_year > span.end_year)
        throw std::invalid_argument("interpolate_annual: bad span");

    VariablePanel out;
    out.variable_id = panel.variable_id;
    out.unit = panel.unit;
    out.resolution = Resolution::Yearly;

    std::map<RegionId, std::map<int, double>> observed;
    for (const auto& [key, value] : panel.values)
        if (value) observed[key.region][key.time.year] = *value;

    for (const auto& region : panel.regions()) {
        const auto it = observed.find(region);
        for (int y = span.start_year; y <= span.end_year; ++y) {
            std::optional<double> v;
            if (it != observed.end() && !it->second.empty()) {
                const auto& obs = it->second;
                auto exact = obs.find(y);
                if (exact != obs.end()) {
                    v = exact->second;
                } else {
                    auto after = obs.lower_bound(y);
                    if (after == obs.begin()) {
                        v = after->second;  // before first observation: flat
                    } else if (after == obs.end()) {
                        v = std::prev(after)->second;  // past last: flat
                    } else {
                        auto before = std::prev(after);
                        const double frac = static_cast<double>(y - before->first) /
                                            static_cast<double>(after->first - before->first);
                        v = before->second + frac * (after->second - before->second);
                    }
                }
            }
            out.values[PanelKey{region, TimeKey{Resolution::Yearly, y, 0}}] = v;
        }
    }
    return out;
}

VariablePanel broadcast(const VariablePanel& panel, Resolution target) {
    if (panel.resolution != Resolution::Yearly)
        throw std::invalid_argument("broadcast: panel must be yearly");
    if (target != Resolution::Monthly && target != Resolution::Weekly)
        throw std::invalid_argument("broadcast: target must be monthly or weekly");

    VariablePanel out;
    out.variable_id = panel.variable_id;
    out.unit = panel.unit;
    out.resolution = target;
    for (const auto& [key, value] : panel.values) {
        const int n = target == Resolution::Monthly ? 12 : iso_weeks_in_year(key.time.year);
        for (int sub = 1; sub <= n; ++sub) {
            out.values[PanelKey{key.region, TimeKey{target, key.time.year, sub}}] = value;
        }
    }
    return out;
}

MultipleImputeResult multiple_impute_percentiles(
    const std::vector<std::optional<double>>& values, int m, std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("multiple_impute_percentiles: m must be >= 1");
    std::vector<double> observed;
    for (const auto& v : values)
        if (v) observed.push_back(*v);
    if (observed.empty())
        throw std::runtime_error("multiple_impute_percentiles: nothing to impute from");

    std::mt19937_64 rng(seed);
    // Explicit index draw; distribution classes vary across standard libraries.
    auto draw = [&]() {
        return observed[static_cast<std::size_t>(rng() % observed.size())];
    };

    MultipleImputeResult result;
    result.completed.reserve(static_cast<std::size_t>(m));
    result.mean.assign(values.size(), 0.0);
    for (int rep = 0; rep < m; ++rep) {
        std::vector<double> filled(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            filled[i] = values[i] ? *values[i] : draw();
        for (std::size_t i = 0; i < values.size(); ++i) result.mean[i] += filled[i];
        result.completed.push_back(std::move(filled));
    }
    for (auto& v : result.mean) v /= static_cast<double>(m);
    return result;
}

} // namespace enhvi
