#include "enhvi/pipeline.hpp"

#include "enhvi/impute.hpp"
#include "enhvi/io.hpp"
#include "enhvi/reference_specs.hpp"
#include "enhvi/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace enhvi::pipeline {

using nlohmann::json;

void PipelineConfig::apply_defaults() {
    if (!agg_overrides.count("ehf")) agg_overrides["ehf"] = AggRule::Max;
    if (!agg_overrides.count("ecf")) agg_overrides["ecf"] = AggRule::Max;
    if (!category_by_index.count("heat")) category_by_index["heat"] = MortalityCategory::Heat;
    if (!category_by_index.count("cold")) category_by_index["cold"] = MortalityCategory::AllCause;
    if (!category_by_index.count("air_quality"))
        category_by_index["air_quality"] = MortalityCategory::AirQuality;

    synth.seed = seed;
    synth.level = level;
    synth.start_year = start_year;
    synth.years = years;

    if (climatology.baseline_start_year == 2000 && climatology.baseline_end_year == 2020) {
        climatology.baseline_start_year = start_year;
        climatology.baseline_end_year = last_year();
    }

    const auto fix = fixture();
    if (daily_temps.empty()) daily_temps = fix / "daily_temps.csv";
    if (cell_weights.empty()) cell_weights = fix / "cell_weights.csv";
    if (mortality.empty()) mortality = fix / "mortality.csv";
    if (crosswalk.empty()) crosswalk = fix / "crosswalk.csv";
    if (demographics_dir.empty()) demographics_dir = fix / "demographics";
    if (pollutant_grids.empty()) {
        for (const char* p : {"no", "no2", "o3", "pm25"})
            pollutant_grids[p] = fix / "grids" / (std::string(p) + ".csv");
    }
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    json doc = json::parse(in);

    PipelineConfig cfg;
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();
    if (doc.contains("fixture_dir")) cfg.fixture_dir = doc["fixture_dir"].get<std::string>();
    if (doc.contains("level")) cfg.level = level_from_string(doc["level"].get<std::string>());
    if (doc.contains("start_year")) cfg.start_year = doc["start_year"].get<int>();
    if (doc.contains("years")) cfg.years = doc["years"].get<int>();
    if (doc.contains("resolutions")) {
        cfg.resolutions.clear();
        for (const auto& r : doc["resolutions"])
            cfg.resolutions.push_back(resolution_from_string(r.get<std::string>()));
    }
    if (doc.contains("synth")) {
        const auto& s = doc["synth"];
        if (s.contains("regions")) cfg.synth.regions = s["regions"].get<int>();
        if (s.contains("cells_per_region"))
            cfg.synth.cells_per_region = s["cells_per_region"].get<int>();
        if (s.contains("regions_per_sa3"))
            cfg.synth.regions_per_sa3 = s["regions_per_sa3"].get<int>();
        if (s.contains("mortality_noise"))
            cfg.synth.mortality_noise = s["mortality_noise"].get<double>();
        if (s.contains("heat_event")) {
            const auto& e = s["heat_event"];
            synth::HeatEvent ev;
            if (e.contains("region_index")) ev.region_index = e["region_index"].get<int>();
            if (e.contains("start")) ev.start = parse_iso_date(e["start"].get<std::string>());
            if (e.contains("days")) ev.days = e["days"].get<int>();
            if (e.contains("amplitude_degc"))
                ev.amplitude_degc = e["amplitude_degc"].get<double>();
            cfg.synth.heat_event = ev;
        }
    }
    if (doc.contains("inputs")) {
        const auto& i = doc["inputs"];
        if (i.contains("daily_temps")) cfg.daily_temps = i["daily_temps"].get<std::string>();
        if (i.contains("cell_weights")) cfg.cell_weights = i["cell_weights"].get<std::string>();
        if (i.contains("mortality")) cfg.mortality = i["mortality"].get<std::string>();
        if (i.contains("crosswalk")) cfg.crosswalk = i["crosswalk"].get<std::string>();
        if (i.contains("demographics_dir"))
            cfg.demographics_dir = i["demographics_dir"].get<std::string>();
        if (i.contains("pollutant_grids"))
            for (const auto& [k, v] : i["pollutant_grids"].items())
                cfg.pollutant_grids[k] = v.get<std::string>();
    }
    if (doc.contains("specs"))
        for (const auto& p : doc["specs"]) cfg.spec_paths.push_back(p.get<std::string>());
    if (doc.contains("climatology")) {
        const auto& c = doc["climatology"];
        if (c.contains("baseline_start_year"))
            cfg.climatology.baseline_start_year = c["baseline_start_year"].get<int>();
        if (c.contains("baseline_end_year"))
            cfg.climatology.baseline_end_year = c["baseline_end_year"].get<int>();
        if (c.contains("hot_percentile"))
            cfg.climatology.hot_percentile = c["hot_percentile"].get<double>();
        if (c.contains("cold_percentile"))
            cfg.climatology.cold_percentile = c["cold_percentile"].get<double>();
        if (c.contains("event_window_days"))
            cfg.climatology.event_window_days = c["event_window_days"].get<int>();
        if (c.contains("acclimatisation_days"))
            cfg.climatology.acclimatisation_days = c["acclimatisation_days"].get<int>();
        if (c.contains("daily_mean_rule"))
            cfg.climatology.mean_rule =
                c["daily_mean_rule"].get<std::string>() == "next_day_min"
                    ? DailyMeanRule::NextDayMin
                    : DailyMeanRule::SameDayMin;
    }
    if (doc.contains("aggregation")) {
        const auto& a = doc["aggregation"];
        auto rule = [](const std::string& s) {
            if (s == "mean") return AggRule::Mean;
            if (s == "max") return AggRule::Max;
            throw std::runtime_error("unknown aggregation rule: '" + s + "'");
        };
        if (a.contains("default")) cfg.default_agg = rule(a["default"].get<std::string>());
        if (a.contains("overrides"))
            for (const auto& [k, v] : a["overrides"].items())
                cfg.agg_overrides[k] = rule(v.get<std::string>());
    }
    if (doc.contains("missing_policy")) {
        const auto& m = doc["missing_policy"];
        const std::string kind = m.at("kind").get<std::string>();
        if (kind == "propagate") cfg.missing_policy = MissingPolicy::propagate();
        else if (kind == "mean_fill") cfg.missing_policy = MissingPolicy::mean_fill();
        else if (kind == "multiple_impute")
            cfg.missing_policy = MissingPolicy::multiple_impute(
                m.value("m", 5), m.value("seed", cfg.seed));
        else throw std::runtime_error("unknown missing_policy kind: '" + kind + "'");
    }
    if (doc.contains("method"))
        cfg.method_override = index_method_from_string(doc["method"].get<std::string>());
    if (doc.contains("mortality_category_by_index"))
        for (const auto& [k, v] : doc["mortality_category_by_index"].items())
            cfg.category_by_index[k] = mortality_category_from_string(v.get<std::string>());

    cfg.apply_defaults();
    return cfg;
}

std::vector<IndexSpec> PipelineConfig::load_specs() const {
    std::vector<IndexSpec> specs;
    if (spec_paths.empty()) {
        specs = reference_specs();
    } else {
        for (const auto& p : spec_paths) specs.push_back(io::read_index_spec(p));
    }
    if (method_override)
        for (auto& s : specs) s.method = *method_override;
    return specs;
}

MortalityCategory PipelineConfig::category_for(const std::string& index_id) const {
    auto it = category_by_index.find(index_id);
    return it == category_by_index.end() ? MortalityCategory::AllCause : it->second;
}

AggRule PipelineConfig::agg_rule_for(const std::string& variable_id) const {
    auto it = agg_overrides.find(variable_id);
    return it == agg_overrides.end() ? default_agg : it->second;
}

std::filesystem::path indicator_panel_path(const PipelineConfig& cfg, Resolution res,
                                           const std::string& variable_id) {
    return cfg.out_dir / "indicators" / to_string(res) / (variable_id + ".csv");
}

std::filesystem::path index_result_path(const PipelineConfig& cfg, const std::string& index_id,
                                        Resolution res, IndexMethod method) {
    return cfg.out_dir / "index" /
           (index_id + "_" + to_string(res) + "_" + to_string(method) + ".csv");
}

std::filesystem::path weight_table_path(const PipelineConfig& cfg, const std::string& index_id) {
    return cfg.out_dir / "weights" / (index_id + ".json");
}

synth::Fixture run_synth(const PipelineConfig& cfg) {
    auto fixture = synth::generate(cfg.synth);
    write_fixture(fixture, cfg.fixture());

    // Sanity check on the planted signal: the mortality category rate
    // should correlate with the generating variables at SA3 level.
    std::map<RegionId, double> rate;
    for (const auto& e : fixture.mortality.entries)
        if (e.cause == kCauseAllCause) rate[e.region] = e.rate;
    std::map<RegionId, double> signal;
    std::map<RegionId, int> count;
    for (int i = 0; i < cfg.synth.regions; ++i) {
        const auto& parent = fixture.crosswalk.at(fixture.regions[i]);
        double s = 0.0;
        for (const auto& vid : fixture.mortality_signal_variables) {
            const auto& panel = fixture.demographics.at(vid);
            const auto times = panel.times();
            if (auto v = panel.at(fixture.regions[i], times.front())) s += *v;
        }
        signal[parent] += s;
        count[parent] += 1;
    }
    std::vector<double> xs, ys;
    for (const auto& [r, s] : signal) {
        xs.push_back(s / count[r]);
        ys.push_back(rate.at(r));
    }
    const double tau = stats::kendall_tau(std::span<const double>(xs),
                                          std::span<const double>(ys));
    if (tau <= 0.3)
        throw std::runtime_error("synth: planted mortality signal too weak (tau = " +
                                 std::to_string(tau) + "); lower mortality_noise");
    return fixture;
}

namespace {

void require_file(const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p))
        throw std::runtime_error(std::string(what) + " not found: " + p.string());
}

using DailyMap = std::map<std::pair<RegionId, std::int64_t>, std::optional<double>>;

} // namespace

void run_indicators(const PipelineConfig& cfg) {
    require_file(cfg.daily_temps, "daily temperature file");
    const auto series = read_daily_temps_csv(cfg.daily_temps, cfg.level);
    const auto clim = build_climatology(series, cfg.climatology);

    const std::int64_t first = days_from_civil({cfg.start_year, 1, 1});
    const std::int64_t last = days_from_civil({cfg.last_year(), 12, 31});

    DailyMap ehf_daily, ecf_daily, hist_heat, hist_cold;
    for (const auto& region : series.regions()) {
        for (std::int64_t d = first; d <= last; ++d) {
            ehf_daily[{region, d}] = ehf(series, clim, region, d);
            ecf_daily[{region, d}] = ecf(series, clim, region, d);
            hist_heat[{region, d}] =
                historical_percentile(series, clim, region, d, PercentileMode::Heat);
            hist_cold[{region, d}] =
                historical_percentile(series, clim, region, d, PercentileMode::Cold);
        }
    }

    std::map<std::string, const DailyMap*> temp_indicators = {{"ehf", &ehf_daily},
                                                              {"ecf", &ecf_daily},
                                                              {"hist_temp_heat", &hist_heat},
                                                              {"hist_temp_cold", &hist_cold}};

    std::map<std::string, DailyMap> pollutant_daily;
    if (!cfg.pollutant_grids.empty()) {
        require_file(cfg.cell_weights, "cell weight table");
        const auto weights = io::read_cell_weights_csv(cfg.cell_weights);
        for (const auto& [pid, path] : cfg.pollutant_grids) {
            require_file(path, "pollutant grid");
            const auto grid = io::read_grid_csv(path);
            const auto zonal = zonal_aggregate(grid, weights, pid);
            DailyMap daily;
            for (const auto& [key, v] : zonal.panel.values) {
                // day-of-year TimeKey back to an absolute day
                std::int64_t d = days_from_civil({key.time.year, 1, 1}) + key.time.sub - 1;
                daily[{key.region, d}] = v;
            }
            pollutant_daily[pid] = std::move(daily);
        }
    }

    for (const auto res : cfg.resolutions) {
        for (const auto& [vid, daily] : temp_indicators) {
            auto panel = temporal_aggregate(*daily, res, cfg.agg_rule_for(vid), vid);
            io::write_panel_csv(panel, indicator_panel_path(cfg, res, vid));
        }
        for (const auto& [vid, daily] : pollutant_daily) {
            auto panel = temporal_aggregate(daily, res, cfg.agg_rule_for(vid), vid);
            io::write_panel_csv(panel, indicator_panel_path(cfg, res, vid));
        }
    }
}

std::map<std::string, VariablePanel> load_variable_panels(const PipelineConfig& cfg,
                                                          const IndexSpec& spec,
                                                          Resolution res) {
    std::map<std::string, VariablePanel> panels;
    const auto& indicators = indicator_variable_ids();
    for (const auto& vid : spec.all_variable_ids()) {
        if (panels.count(vid)) continue;
        const bool is_indicator =
            std::find(indicators.begin(), indicators.end(), vid) != indicators.end();
        if (is_indicator) {
            const auto path = indicator_panel_path(cfg, res, vid);
            if (!std::filesystem::exists(path))
                throw std::runtime_error("no panel for spec variable '" + vid +
                                         "' (expected " + path.string() +
                                         "; run `indicators` first)");
            panels[vid] = io::read_panel_csv(path, vid);
        } else {
            const auto path = cfg.demographics_dir / (vid + ".csv");
            if (!std::filesystem::exists(path))
                throw std::runtime_error("no panel for spec variable '" + vid + "' (expected " +
                                         path.string() + ")");
            auto yearly = interpolate_annual(io::read_panel_csv(path, vid),
                                             YearSpan{cfg.start_year, cfg.last_year()});
            panels[vid] = res == Resolution::Yearly ? std::move(yearly)
                                                    : broadcast(yearly, res);
        }
    }
    return panels;
}

VariablePanel load_mortality_panel(const PipelineConfig& cfg, MortalityCategory category,
                                   const std::vector<RegionId>& targets) {
    require_file(cfg.mortality, "mortality file");
    const auto table = io::read_mortality_csv(cfg.mortality);
    if (table.entries.empty()) throw std::runtime_error("mortality file is empty");
    auto sa3 = mortality_category_rates(table, category);
    if (cfg.level == Level::SA3) return sa3;
    require_file(cfg.crosswalk, "crosswalk file");
    const auto mapping = io::read_crosswalk_csv(cfg.crosswalk);
    return crosswalk_to_level(sa3, mapping, cfg.level, targets);
}

void run_weights(const PipelineConfig& cfg) {
    for (const auto& spec : cfg.load_specs()) {
        BuildContext ctx;
        ctx.spec = spec;
        ctx.spec.method = IndexMethod::EqualThemed;  // weights need no weight table
        ctx.panels = load_variable_panels(cfg, spec, Resolution::Yearly);
        ctx.missing_policy = cfg.missing_policy;
        const auto category = cfg.category_for(spec.index_id);
        const auto mortality = load_mortality_panel(cfg, category, ctx.region_universe());
        auto table = compute_weights(ctx, mortality, category);
        io::write_weight_table(table, weight_table_path(cfg, spec.index_id));
    }
}

void run_build(const PipelineConfig& cfg) {
    for (const auto& spec : cfg.load_specs()) {
        for (const auto res : cfg.resolutions) {
            BuildContext ctx;
            ctx.spec = spec;
            ctx.panels = load_variable_panels(cfg, spec, res);
            ctx.missing_policy = cfg.missing_policy;
            if (spec.method == IndexMethod::Weighted) {
                const auto wpath = weight_table_path(cfg, spec.index_id);
                if (!std::filesystem::exists(wpath))
                    throw std::runtime_error("weight table " + wpath.string() +
                                             " not found; run `weights` first");
                ctx.weights = io::read_weight_table(wpath);
            }
            auto result = build_index(ctx);
            write_index_result_csv(result, cfg.level,
                                   index_result_path(cfg, spec.index_id, res, spec.method));
        }
    }
}

namespace {

BuildContext make_context(const PipelineConfig& cfg, const IndexSpec& spec, Resolution res) {
    BuildContext ctx;
    ctx.spec = spec;
    ctx.panels = load_variable_panels(cfg, spec, res);
    ctx.missing_policy = cfg.missing_policy;
    if (spec.method == IndexMethod::Weighted)
        ctx.weights = io::read_weight_table(weight_table_path(cfg, spec.index_id));
    return ctx;
}

IndexSpec find_spec(const PipelineConfig& cfg, const std::string& index_id) {
    for (const auto& spec : cfg.load_specs())
        if (spec.index_id == index_id) return spec;
    throw std::runtime_error("unknown index '" + index_id + "'");
}

} // namespace

BreakdownReport run_breakdown(const PipelineConfig& cfg, const std::string& index_id,
                              const std::string& region_code, Resolution resolution,
                              int year, int sub, const std::filesystem::path& out_file) {
    const auto spec = find_spec(cfg, index_id);
    auto ctx = make_context(cfg, spec, resolution);
    auto result = build_index(ctx);
    const RegionId region{region_code, cfg.level};
    const TimeKey time{resolution, year, sub};
    auto report = breakdown(result, ctx, region, time);
    if (report.reconstruction_error > 1e-9)
        throw SelfCheckError("breakdown reconstruction error " +
                             std::to_string(report.reconstruction_error) + " exceeds 1e-9");
    write_breakdown_json(report, out_file);
    return report;
}

void run_export(const PipelineConfig& cfg, const std::string& index_id, Resolution resolution,
                int year, int sub, const std::filesystem::path& out_file) {
    const auto spec = find_spec(cfg, index_id);
    auto ctx = make_context(cfg, spec, resolution);
    auto result = build_index(ctx);
    const TimeKey time{resolution, year, sub};
    bool found = false;
    for (const auto& [key, cell] : result.cells)
        if (key.time == time) found = true;
    if (!found)
        throw std::runtime_error("no index values at " + std::to_string(year) + "/" +
                                 std::to_string(sub));
    write_geojson_join(result, time, out_file);
}

} // namespace enhvi::pipeline
