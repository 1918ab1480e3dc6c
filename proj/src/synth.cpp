#include "enhvi/synth.hpp"

#include "enhvi/io.hpp"
#include "enhvi/reference_specs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace enhvi::synth {

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double stddev) {
    if (have_spare_) {
        have_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return mean + stddev * r * std::cos(theta);
}

namespace {

std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 1469598103934665603ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string region_code(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "R%03d", i);
    return buf;
}

std::string sa3_code(int g) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%03d", g);
    return buf;
}

std::string cell_code(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%05d", i);
    return buf;
}

// Variables observed only at census years (2011 and 2016); the rest are
// observed every fixture year.
const std::vector<std::string> kCensusVars = {
    "population_density", "median_income",   "low_income",       "education_low",
    "unemployment",       "elderly",         "infants",          "single_parents",
    "unpaid_childcare",   "needs_assistance", "disability",      "living_alone",
    "second_language",    "indigenous",      "mobile_homes",     "crowded_dwellings",
    "renters",            "mortgage_payers", "vehicle_access",   "internet_access"};

bool is_census(const std::string& vid) {
    return std::find(kCensusVars.begin(), kCensusVars.end(), vid) != kCensusVars.end();
}

} // namespace

Fixture generate(const SynthConfig& config) {
    Fixture fx;
    fx.config = config;
    fx.mortality_signal_variables = {"elderly", "low_income", "smoker"};

    for (int i = 0; i < config.regions; ++i)
        fx.regions.push_back(RegionId{region_code(i), config.level});

    const int last_year = config.start_year + config.years - 1;

    // --- daily temperatures (with lead-in for the 33-day indicator windows)
    {
        Rng rng(fnv1a("temps") ^ config.seed);
        const std::int64_t first = days_from_civil({config.start_year - 1, 11, 20});
        const std::int64_t last = days_from_civil({last_year, 12, 31});
        for (int i = 0; i < config.regions; ++i) {
            const double base = rng.uniform(10.0, 25.0);
            const double amp = rng.uniform(4.0, 9.0);
            const double spread = rng.uniform(6.0, 10.0);
            for (std::int64_t d = first; d <= last; ++d) {
                const Date date = civil_from_days(d);
                const double doy = static_cast<double>(day_of_year(date));
                // Southern-hemisphere seasonality: warmest mid-January.
                double tmean = base +
                               amp * std::cos(2.0 * std::numbers::pi * (doy - 15.0) / 365.25) +
                               rng.normal(0.0, 1.5);
                if (config.heat_event && config.heat_event->region_index == i) {
                    const std::int64_t ev = days_from_civil(config.heat_event->start);
                    if (d >= ev && d < ev + config.heat_event->days)
                        tmean += config.heat_event->amplitude_degc;
                }
                fx.daily_temps.set(fx.regions[i], date, tmean + spread / 2.0,
                                   tmean - spread / 2.0);
            }
        }
    }

    // --- cell weights and pollutant grids
    {
        Rng rng(fnv1a("cells") ^ config.seed);
        int cell = 0;
        std::vector<std::vector<std::string>> region_cells(config.regions);
        for (int i = 0; i < config.regions; ++i) {
            std::vector<double> u(config.cells_per_region);
            double sum = 0.0;
            for (auto& x : u) {
                x = rng.uniform(0.2, 1.0);
                sum += x;
            }
            double acc = 0.0;
            for (int c = 0; c < config.cells_per_region; ++c) {
                const std::string id = cell_code(cell++);
                region_cells[i].push_back(id);
                double w = (c + 1 == config.cells_per_region) ? 1.0 - acc : u[c] / sum;
                acc += w;
                fx.cell_weights.entries.push_back({id, fx.regions[i], w});
            }
        }

        const std::pair<std::string, double> pollutants[] = {
            {"no", 10.0}, {"no2", 12.0}, {"o3", 20.0}, {"pm25", 8.0}};
        const std::int64_t first = days_from_civil({config.start_year, 1, 1});
        const std::int64_t last = days_from_civil({last_year, 12, 31});
        for (const auto& [pid, level] : pollutants) {
            Rng prng(fnv1a("grid_" + pid) ^ config.seed);
            GridSeries grid;
            grid.resolution = Resolution::Daily;
            for (int i = 0; i < config.regions; ++i) {
                for (const auto& cid : region_cells[i]) {
                    const double base = level * std::exp(prng.normal(0.0, 0.4));
                    for (std::int64_t d = first; d <= last; ++d) {
                        const Date date = civil_from_days(d);
                        TimeKey t{Resolution::Daily, date.year, day_of_year(date)};
                        grid.values[{cid, t}] = base * std::exp(prng.normal(0.0, 0.2));
                    }
                }
            }
            fx.pollutant_grids[pid] = std::move(grid);
        }
    }

    // --- demographics (latents kept for the mortality signal)
    std::map<std::string, std::vector<double>> latents;
    {
        for (const auto& vid : reference_variable_ids()) {
            const auto& ind = indicator_variable_ids();
            if (std::find(ind.begin(), ind.end(), vid) != ind.end()) continue;
            Rng rng(fnv1a("demo_" + vid) ^ config.seed);
            std::vector<double> u(config.regions);
            for (auto& x : u) x = rng.uniform();
            latents[vid] = u;

            VariablePanel panel;
            panel.variable_id = vid;
            panel.resolution = Resolution::Yearly;
            std::vector<int> years;
            if (is_census(vid)) {
                years = {2011, 2016};
            } else {
                for (int y = config.start_year; y <= last_year; ++y) years.push_back(y);
            }
            for (int i = 0; i < config.regions; ++i) {
                for (int y : years) {
                    const double drift = 0.03 * static_cast<double>(y - config.start_year);
                    const double value = 100.0 * (0.2 + 0.8 * u[i]) * (1.0 + drift) +
                                         rng.normal(0.0, 0.5);
                    panel.values[PanelKey{fx.regions[i],
                                          TimeKey{Resolution::Yearly, y, 0}}] = value;
                }
            }
            fx.demographics[vid] = std::move(panel);
        }
    }

    // --- SA3 crosswalk and mortality with a recoverable signal
    {
        Rng rng(fnv1a("mortality") ^ config.seed);
        const int groups = (config.regions + config.regions_per_sa3 - 1) / config.regions_per_sa3;
        std::vector<double> signal(groups, 0.0);
        std::vector<int> count(groups, 0);
        for (int i = 0; i < config.regions; ++i) {
            const int g = i / config.regions_per_sa3;
            fx.crosswalk[fx.regions[i]] = RegionId{sa3_code(g), Level::SA3};
            double s = 0.0;
            for (const auto& vid : fx.mortality_signal_variables) s += latents[vid][i];
            signal[g] += s / static_cast<double>(fx.mortality_signal_variables.size());
            count[g] += 1;
        }
        const double noise = config.mortality_noise;
        // Averaging latents shrinks the spread across groups; min-max
        // rescale so the slope acts on the full [0,1] range and the signal
        // stays recoverable at the configured noise level.
        for (int g = 0; g < groups; ++g) signal[g] /= count[g];
        const double lo = *std::min_element(signal.begin(), signal.end());
        const double hi = *std::max_element(signal.begin(), signal.end());
        for (int g = 0; g < groups; ++g) {
            const double s = hi > lo ? (signal[g] - lo) / (hi - lo) : 0.5;
            auto rate = [&](double base, double slope) {
                return std::max(0.0, base + slope * s + rng.normal(0.0, noise * slope * 0.25));
            };
            const RegionId sa3{sa3_code(g), Level::SA3};
            const int p0 = 2014, p1 = 2019;
            fx.mortality.entries.push_back(
                {sa3, kCauseCoronaryHeartDisease, p0, p1, rate(50.0, 60.0)});
            fx.mortality.entries.push_back(
                {sa3, kCauseCerebrovascularDisease, p0, p1, rate(30.0, 40.0)});
            fx.mortality.entries.push_back({sa3, kCauseHeartFailure, p0, p1, rate(15.0, 20.0)});
            fx.mortality.entries.push_back(
                {sa3, kCauseCardiacArrhythmia, p0, p1, rate(8.0, 12.0)});
            fx.mortality.entries.push_back({sa3, kCauseCopd, p0, p1, rate(25.0, 45.0)});
            fx.mortality.entries.push_back({sa3, kCauseAllCause, p0, p1, rate(400.0, 300.0)});
        }
    }

    return fx;
}

void write_fixture(const Fixture& fx, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_daily_temps_csv(fx.daily_temps, fx.config.level, dir / "daily_temps.csv");
    io::write_cell_weights_csv(fx.cell_weights, dir / "cell_weights.csv");
    for (const auto& [pid, grid] : fx.pollutant_grids)
        io::write_grid_csv(grid, dir / "grids" / (pid + ".csv"));
    for (const auto& [vid, panel] : fx.demographics)
        io::write_panel_csv(panel, dir / "demographics" / (vid + ".csv"));
    io::write_mortality_csv(fx.mortality, dir / "mortality.csv");
    io::write_crosswalk_csv(fx.crosswalk, dir / "crosswalk.csv");
}

} // namespace enhvi::synth
