#include "enhvi/index.hpp"

#include "enhvi/impute.hpp"
#include "enhvi/io.hpp"
#include "enhvi/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace enhvi {

using nlohmann::json;

void BuildContext::validate() const {
    spec.validate();
    for (const auto& vid : spec.all_variable_ids()) {
        if (!panels.count(vid))
            throw std::runtime_error("no panel for spec variable '" + vid + "'");
    }
    if (spec.method == IndexMethod::Weighted && !weights)
        throw std::runtime_error("weighted method requires a weight table");
    std::optional<Resolution> res;
    for (const auto& [vid, panel] : panels) {
        if (!res) res = panel.resolution;
        else if (panel.resolution != *res)
            throw std::runtime_error("panel '" + vid + "' resolution differs from the build");
    }
}

std::vector<RegionId> BuildContext::region_universe() const {
    std::set<RegionId> seen;
    for (const auto& [vid, panel] : panels)
        for (const auto& [key, v] : panel.values) seen.insert(key.region);
    return {seen.begin(), seen.end()};
}

std::vector<TimeKey> BuildContext::time_universe() const {
    std::set<std::pair<int, int>> seen;
    std::vector<TimeKey> out;
    for (const auto& [vid, panel] : panels) {
        for (const auto& t : panel.times())
            if (seen.insert({t.year, t.sub}).second) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

VariablePanel apply_polarity(const VariablePanel& panel, Polarity polarity) {
    if (polarity.direction == PolarityDir::RiskIncreasing) return panel;
    VariablePanel out = panel;
    for (auto& [key, value] : out.values)
        if (value) value = -*value;
    return out;
}

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

/// Polarity-adjusted spatial percentiles of one variable over `regions` at t.
std::vector<std::optional<double>> variable_percentiles(const BuildContext& ctx,
                                                        const std::string& vid, Polarity pol,
                                                        const std::vector<RegionId>& regions,
                                                        const TimeKey& t) {
    const auto& panel = ctx.panels.at(vid);
    const double sign = pol.direction == PolarityDir::RiskDecreasing ? -1.0 : 1.0;
    std::vector<std::optional<double>> raw(regions.size());
    for (std::size_t i = 0; i < regions.size(); ++i) {
        if (auto v = panel.at(regions[i], t)) raw[i] = sign * *v;
    }
    return stats::spatial_percentile(raw);
}

/// Missing-policy fill over one region's percentile row. Returns false
/// when nothing is observed (the row stays missing).
bool fill_row(std::vector<std::optional<double>>& row, const MissingPolicy& policy,
              std::uint64_t row_seed) {
    bool any_missing = false, any_present = false;
    for (const auto& v : row) (v ? any_present : any_missing) = true;
    if (!any_present) return false;
    if (!any_missing) return true;
    switch (policy.kind) {
    case MissingPolicy::Kind::Propagate:
        return false;
    case MissingPolicy::Kind::MeanFill: {
        double sum = 0.0;
        int n = 0;
        for (const auto& v : row)
            if (v) {
                sum += *v;
                ++n;
            }
        const double fill = sum / n;
        for (auto& v : row)
            if (!v) v = fill;
        return true;
    }
    case MissingPolicy::Kind::MultipleImpute: {
        auto mi = multiple_impute_percentiles(row, policy.m, row_seed);
        for (std::size_t i = 0; i < row.size(); ++i) row[i] = mi.mean[i];
        return true;
    }
    }
    return false;
}

struct SubDetail {
    std::vector<std::optional<double>> raw;  // S_ikt per region (ordered as `regions`)
    // theme_id -> per-region theme percentile score
    std::vector<std::pair<std::string, std::vector<std::optional<double>>>> theme_scores;
    // variable_id -> per-region polarity-adjusted percentile
    std::vector<std::pair<std::string, std::vector<std::optional<double>>>> var_pcts;
    std::vector<std::string> diags;
};

SubDetail compute_equal_sum(const BuildContext& ctx, SubIndexKind kind,
                            const std::vector<RegionId>& regions, const TimeKey& t) {
    SubDetail detail;
    const auto& sub = ctx.spec.sub_index(kind);
    std::vector<std::vector<std::optional<double>>> pcts;
    for (const auto& theme : sub.themes) {
        for (const auto& [vid, pol] : theme.variables) {
            pcts.push_back(variable_percentiles(ctx, vid, pol, regions, t));
            detail.var_pcts.emplace_back(vid, pcts.back());
        }
    }
    detail.raw.assign(regions.size(), std::nullopt);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        std::vector<std::optional<double>> row(pcts.size());
        for (std::size_t v = 0; v < pcts.size(); ++v) row[v] = pcts[v][i];
        const std::uint64_t row_seed =
            mix(ctx.missing_policy.seed,
                mix(fnv1a(regions[i].code),
                    fnv1a(to_string(kind)) ^ (static_cast<std::uint64_t>(t.year) << 16 |
                                              static_cast<std::uint64_t>(t.sub))));
        if (!fill_row(row, ctx.missing_policy, row_seed)) continue;
        double sum = 0.0;
        for (const auto& v : row) sum += *v;
        detail.raw[i] = sum;
    }
    return detail;
}

SubDetail compute_themed(const BuildContext& ctx, SubIndexKind kind,
                         const std::vector<RegionId>& regions, const TimeKey& t,
                         bool weighted) {
    SubDetail detail;
    const auto& sub = ctx.spec.sub_index(kind);

    // One entry per theme usable at t (>= 1 variable with data).
    std::vector<std::vector<std::optional<double>>> theme_score_vectors;
    for (const auto& theme : sub.themes) {
        struct Var {
            std::string id;
            double weight;
            std::vector<std::optional<double>> pct;
        };
        std::vector<Var> usable;
        for (const auto& [vid, pol] : theme.variables) {
            auto pct = variable_percentiles(ctx, vid, pol, regions, t);
            detail.var_pcts.emplace_back(vid, pct);
            const bool has_data =
                std::any_of(pct.begin(), pct.end(), [](const auto& v) { return v.has_value(); });
            if (!has_data) continue;
            double w = 1.0;
            if (weighted) w = ctx.weights->at(vid, theme.theme_id, kind);
            usable.push_back({vid, w, std::move(pct)});
        }
        if (usable.empty()) {
            detail.diags.push_back("theme '" + theme.theme_id + "' has no usable variables at " +
                                   std::to_string(t.year) + "/" + std::to_string(t.sub) +
                                   "; dropped for this time point");
            continue;
        }
        // Inner weighted mean over the N_pt usable variables, per region.
        std::vector<std::optional<double>> inner(regions.size());
        for (std::size_t i = 0; i < regions.size(); ++i) {
            std::vector<std::optional<double>> row(usable.size());
            for (std::size_t v = 0; v < usable.size(); ++v) row[v] = usable[v].pct[i];
            const std::uint64_t row_seed =
                mix(ctx.missing_policy.seed,
                    mix(fnv1a(regions[i].code),
                        fnv1a(theme.theme_id) ^ (static_cast<std::uint64_t>(t.year) << 16 |
                                                 static_cast<std::uint64_t>(t.sub))));
            if (!fill_row(row, ctx.missing_policy, row_seed)) continue;
            double sum = 0.0;
            for (std::size_t v = 0; v < usable.size(); ++v) sum += usable[v].weight * *row[v];
            inner[i] = sum / static_cast<double>(usable.size());
        }
        auto theme_score = stats::spatial_percentile(inner);
        detail.theme_scores.emplace_back(theme.theme_id, theme_score);
        theme_score_vectors.push_back(std::move(theme_score));
    }

    detail.raw.assign(regions.size(), std::nullopt);
    for (std::size_t i = 0; i < regions.size(); ++i) {
        double sum = 0.0;
        int present = 0;
        bool missing_any = false;
        for (const auto& ts : theme_score_vectors) {
            if (ts[i]) {
                sum += *ts[i];
                ++present;
            } else {
                missing_any = true;
            }
        }
        if (present == 0) continue;
        if (missing_any && ctx.missing_policy.kind == MissingPolicy::Kind::Propagate) continue;
        detail.raw[i] = sum / static_cast<double>(present);
    }
    return detail;
}

SubDetail compute_sub(const BuildContext& ctx, SubIndexKind kind,
                      const std::vector<RegionId>& regions, const TimeKey& t) {
    switch (ctx.spec.method) {
    case IndexMethod::EqualSum:
        return compute_equal_sum(ctx, kind, regions, t);
    case IndexMethod::EqualThemed:
        return compute_themed(ctx, kind, regions, t, false);
    case IndexMethod::Weighted:
        return compute_themed(ctx, kind, regions, t, true);
    }
    throw std::logic_error("bad method");
}

} // namespace

std::map<RegionId, std::optional<double>> equal_sum_subindex(const BuildContext& ctx,
                                                             SubIndexKind kind,
                                                             const TimeKey& t) {
    const auto regions = ctx.region_universe();
    auto detail = compute_equal_sum(ctx, kind, regions, t);
    std::map<RegionId, std::optional<double>> out;
    for (std::size_t i = 0; i < regions.size(); ++i) out[regions[i]] = detail.raw[i];
    return out;
}

std::map<RegionId, std::optional<double>> themed_subindex(const BuildContext& ctx,
                                                          SubIndexKind kind, const TimeKey& t,
                                                          bool weighted,
                                                          std::vector<std::string>* diagnostics) {
    const auto regions = ctx.region_universe();
    auto detail = compute_themed(ctx, kind, regions, t, weighted);
    if (diagnostics)
        diagnostics->insert(diagnostics->end(), detail.diags.begin(), detail.diags.end());
    std::map<RegionId, std::optional<double>> out;
    for (std::size_t i = 0; i < regions.size(); ++i) out[regions[i]] = detail.raw[i];
    return out;
}

IndexResult build_index(const BuildContext& ctx) {
    ctx.validate();
    IndexResult result;
    result.index_id = ctx.spec.index_id;
    result.method = ctx.spec.method;

    const auto regions = ctx.region_universe();
    const auto times = ctx.time_universe();
    if (!times.empty()) result.resolution = ctx.panels.begin()->second.resolution;

    static constexpr SubIndexKind kKinds[3] = {SubIndexKind::Exposure, SubIndexKind::Sensitivity,
                                               SubIndexKind::AdaptiveCapacity};

    for (const auto& t : times) {
        SubDetail details[3];
        std::vector<std::optional<double>> sub_pct[3];
        for (int k = 0; k < 3; ++k) {
            details[k] = compute_sub(ctx, kKinds[k], regions, t);
            sub_pct[k] = stats::spatial_percentile(details[k].raw);
            for (auto& d : details[k].diags) result.diagnostics.push_back(std::move(d));
        }
        for (std::size_t i = 0; i < regions.size(); ++i) {
            IndexCell cell;
            bool all_present = true;
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) {
                cell.sub_raw[k] = details[k].raw[i];
                cell.sub_percentile[k] = sub_pct[k][i];
                if (sub_pct[k][i]) acc += *sub_pct[k][i];
                else all_present = false;
                for (const auto& [theme_id, scores] : details[k].theme_scores)
                    cell.theme_scores[to_string(kKinds[k]) + "/" + theme_id] = scores[i];
                for (const auto& [vid, pcts] : details[k].var_pcts)
                    cell.variable_percentiles[vid] = pcts[i];
            }
            if (all_present)
                cell.overall = ctx.spec.method == IndexMethod::EqualSum ? acc : acc / 3.0;
            result.cells[PanelKey{regions[i], t}] = std::move(cell);
        }
    }
    return result;
}

WeightTable compute_weights(const BuildContext& ctx, const VariablePanel& mortality,
                            MortalityCategory category) {
    ctx.spec.validate();
    if (mortality.values.empty()) throw std::runtime_error("mortality panel is empty");

    const auto regions = ctx.region_universe();

    // Pool each panel over its time span: per-region mean of the
    // non-missing observations, so one value per region faces the
    // multi-year mortality rate.
    auto pooled = [&](const VariablePanel& panel) {
        std::vector<std::optional<double>> out(regions.size());
        const auto times = panel.times();
        for (std::size_t i = 0; i < regions.size(); ++i) {
            double sum = 0.0;
            int n = 0;
            for (const auto& t : times) {
                if (auto v = panel.at(regions[i], t)) {
                    sum += *v;
                    ++n;
                }
            }
            if (n > 0) out[i] = sum / n;
        }
        return out;
    };

    const auto mort = pooled(mortality);
    if (std::none_of(mort.begin(), mort.end(), [](const auto& v) { return v.has_value(); }))
        throw std::runtime_error("mortality panel covers none of the build regions");

    WeightTable table;
    table.mortality_category = category;

    for (const auto& sub : ctx.spec.sub_indices) {
        for (const auto& theme : sub.themes) {
            for (const auto& [vid, pol] : theme.variables) {
                const WeightKey key{vid, theme.theme_id, sub.kind};
                if (sub.kind == SubIndexKind::Exposure) {
                    table.entries[key] = 1.0;
                    continue;
                }
                auto vals = pooled(apply_polarity(ctx.panels.at(vid), pol));
                auto pcts = stats::spatial_percentile(vals);
                double w = 0.0;
                try {
                    w = stats::kendall_tau(std::span<const std::optional<double>>(pcts),
                                           std::span<const std::optional<double>>(mort));
                } catch (const stats::UndefinedCorrelation& e) {
                    table.diagnostics.push_back("variable '" + vid +
                                                "': undefined correlation (" + e.what() +
                                                "); weight set to 0");
                }
                table.entries[key] = w;
            }
        }
    }
    return table;
}

BreakdownReport breakdown(const IndexResult& result, const BuildContext& ctx,
                          const RegionId& region, const TimeKey& time) {
    auto it = result.cells.find(PanelKey{region, time});
    if (it == result.cells.end())
        throw std::runtime_error("no index cell for region '" + region.code + "' at " +
                                 std::to_string(time.year) + "/" + std::to_string(time.sub));
    const IndexCell& cell = it->second;

    BreakdownReport report;
    report.index_id = result.index_id;
    report.method = result.method;
    report.region = region;
    report.time = time;
    report.overall = cell.overall;

    static constexpr SubIndexKind kKinds[3] = {SubIndexKind::Exposure, SubIndexKind::Sensitivity,
                                               SubIndexKind::AdaptiveCapacity};
    double acc = 0.0;
    bool all_present = true;
    for (int k = 0; k < 3; ++k) {
        report.sub_indices.push_back({kKinds[k], cell.sub_percentile[k], cell.sub_raw[k]});
        if (cell.sub_percentile[k]) acc += *cell.sub_percentile[k];
        else all_present = false;
    }
    if (cell.overall && all_present) {
        const double recomputed = result.method == IndexMethod::EqualSum ? acc : acc / 3.0;
        report.reconstruction_error = std::abs(recomputed - *cell.overall);
    }

    for (const auto& sub : ctx.spec.sub_indices) {
        for (const auto& theme : sub.themes) {
            const std::string key = to_string(sub.kind) + "/" + theme.theme_id;
            auto ts = cell.theme_scores.find(key);
            report.themes.push_back(
                {sub.kind, theme.theme_id,
                 ts == cell.theme_scores.end() ? std::nullopt : ts->second});
            for (const auto& [vid, pol] : theme.variables) {
                auto vp = cell.variable_percentiles.find(vid);
                std::optional<double> pct =
                    vp == cell.variable_percentiles.end() ? std::nullopt : vp->second;
                report.variables.push_back(
                    {sub.kind, theme.theme_id, vid, pct, pct && *pct >= 0.5});
            }
        }
    }
    return report;
}

void write_index_result_csv(const IndexResult& result, Level level,
                            const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "region_code,level,resolution,year,sub,index_id,component,value\n";
    auto row = [&](const PanelKey& key, const std::string& component,
                   const std::optional<double>& v) {
        out << key.region.code << ',' << to_string(level) << ',' << to_string(result.resolution)
            << ',' << key.time.year << ',' << key.time.sub << ',' << result.index_id << ','
            << component << ',' << (v ? io::format_value(*v) : std::string()) << '\n';
    };
    static constexpr SubIndexKind kKinds[3] = {SubIndexKind::Exposure, SubIndexKind::Sensitivity,
                                               SubIndexKind::AdaptiveCapacity};
    for (const auto& [key, cell] : result.cells) {
        row(key, "overall", cell.overall);
        for (int k = 0; k < 3; ++k) row(key, to_string(kKinds[k]), cell.sub_percentile[k]);
        for (const auto& [tid, v] : cell.theme_scores) row(key, "theme:" + tid, v);
        for (const auto& [vid, v] : cell.variable_percentiles) row(key, "var:" + vid, v);
    }
}

void write_geojson_join(const IndexResult& result, const TimeKey& time,
                        const std::filesystem::path& path) {
    json doc;
    doc["type"] = "PropertyJoin";
    doc["join_key"] = "region_code";
    doc["index_id"] = result.index_id;
    doc["method"] = to_string(result.method);
    doc["resolution"] = to_string(result.resolution);
    doc["year"] = time.year;
    doc["sub"] = time.sub;
    json values = json::object();
    for (const auto& [key, cell] : result.cells) {
        if (!(key.time == time)) continue;
        if (cell.overall) values[key.region.code] = *cell.overall;
        else values[key.region.code] = nullptr;
    }
    doc["values"] = std::move(values);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

void write_breakdown_json(const BreakdownReport& report, const std::filesystem::path& path) {
    json doc;
    doc["index_id"] = report.index_id;
    doc["method"] = to_string(report.method);
    doc["region_code"] = report.region.code;
    doc["level"] = to_string(report.region.level);
    doc["year"] = report.time.year;
    doc["sub"] = report.time.sub;
    doc["overall"] = report.overall ? json(*report.overall) : json(nullptr);
    doc["reconstruction_error"] = report.reconstruction_error;
    doc["sub_indices"] = json::array();
    for (const auto& s : report.sub_indices) {
        doc["sub_indices"].push_back(
            {{"kind", to_string(s.kind)},
             {"percentile", s.percentile ? json(*s.percentile) : json(nullptr)},
             {"raw_score", s.raw_score ? json(*s.raw_score) : json(nullptr)}});
    }
    doc["themes"] = json::array();
    for (const auto& t : report.themes) {
        doc["themes"].push_back({{"kind", to_string(t.kind)},
                                 {"theme_id", t.theme_id},
                                 {"score", t.score ? json(*t.score) : json(nullptr)}});
    }
    doc["variables"] = json::array();
    for (const auto& v : report.variables) {
        doc["variables"].push_back(
            {{"kind", to_string(v.kind)},
             {"theme_id", v.theme_id},
             {"variable_id", v.variable_id},
             {"percentile", v.percentile ? json(*v.percentile) : json(nullptr)},
             {"above_median", v.above_median}});
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

} // namespace enhvi
