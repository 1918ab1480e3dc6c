#pragma once

#include "enhvi/ingest.hpp"
#include "enhvi/indicators.hpp"
#include "enhvi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enhvi::synth {

/// Deterministic stream generator (splitmix64); identical output on every
/// platform for a given seed, unlike <random> distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();                         // [0,1)
    double uniform(double lo, double hi);
    double normal(double mean, double stddev);  // Box-Muller

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

struct HeatEvent {
    int region_index = 0;  // which synthetic region gets the spike
    Date start{2017, 1, 10};
    int days = 14;
    double amplitude_degc = 12.0;
};

struct SynthConfig {
    std::uint64_t seed = 42;
    int regions = 50;
    Level level = Level::SA2;
    int start_year = 2016;
    int years = 3;
    int cells_per_region = 2;
    int regions_per_sa3 = 5;
    double mortality_noise = 0.4;  // noise stddev relative to signal spread
    std::optional<HeatEvent> heat_event;
};

/// The in-memory fixture; write_fixture() serializes it to the standard
/// file formats.
struct Fixture {
    SynthConfig config;
    std::vector<RegionId> regions;
    DailyTempSeries daily_temps;
    std::map<std::string, GridSeries> pollutant_grids;  // no, no2, o3, pm25
    CellWeightTable cell_weights;
    std::map<std::string, VariablePanel> demographics;  // yearly, sparse years
    MortalityTable mortality;                           // SA3
    RegionMapping crosswalk;                            // build level -> SA3

    // Mortality is a seeded monotone function of these sensitivity
    // variables; recorded so tests can verify the recoverable signal.
    std::vector<std::string> mortality_signal_variables;
};

Fixture generate(const SynthConfig& config);

/// Writes daily_temps.csv, grids/<pollutant>.csv, cell_weights.csv,
/// demographics/<variable>.csv, mortality.csv and crosswalk.csv under dir.
void write_fixture(const Fixture& fixture, const std::filesystem::path& dir);

} // namespace enhvi::synth
