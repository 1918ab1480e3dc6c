#pragma once

#include "enhvi/index.hpp"
#include "enhvi/indicators.hpp"
#include "enhvi/synth.hpp"
#include "enhvi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace enhvi::pipeline {

/// Self-check failure (breakdown reconstruction mismatch); the CLI maps
/// this to exit code 3 rather than 2.
struct SelfCheckError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PipelineConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";
    std::filesystem::path fixture_dir;  // defaults to out_dir/"fixture"
    Level level = Level::SA2;
    std::vector<Resolution> resolutions = {Resolution::Weekly, Resolution::Monthly,
                                           Resolution::Yearly};
    int start_year = 2016;
    int years = 3;

    synth::SynthConfig synth;

    // Input locations; empty entries fall back to the fixture layout.
    std::filesystem::path daily_temps;
    std::filesystem::path cell_weights;
    std::filesystem::path mortality;
    std::filesystem::path crosswalk;
    std::filesystem::path demographics_dir;
    std::map<std::string, std::filesystem::path> pollutant_grids;

    std::vector<std::filesystem::path> spec_paths;  // empty -> built-in reference specs

    ClimatologyParams climatology;
    AggRule default_agg = AggRule::Mean;
    std::map<std::string, AggRule> agg_overrides;  // defaults: ehf/ecf -> max

    MissingPolicy missing_policy = MissingPolicy::mean_fill();
    std::optional<IndexMethod> method_override;
    std::map<std::string, MortalityCategory> category_by_index;

    int last_year() const { return start_year + years - 1; }
    std::filesystem::path fixture() const {
        return fixture_dir.empty() ? out_dir / "fixture" : fixture_dir;
    }

    static PipelineConfig from_file(const std::filesystem::path& path);
    void apply_defaults();

    std::vector<IndexSpec> load_specs() const;
    MortalityCategory category_for(const std::string& index_id) const;
    AggRule agg_rule_for(const std::string& variable_id) const;
};

/// synth: writes the full synthetic fixture under fixture(); returns the
/// in-memory fixture for callers that keep going without re-reading files.
synth::Fixture run_synth(const PipelineConfig& cfg);

/// indicators: EHF / ECF / historical-percentile panels from daily temps,
/// pollutant panels from zonal aggregation, written per resolution under
/// out_dir/indicators/<resolution>/<variable>.csv.
void run_indicators(const PipelineConfig& cfg);

/// weights: one WeightTable JSON per index under out_dir/weights/.
void run_weights(const PipelineConfig& cfg);

/// build: index result CSVs under out_dir/index/, one per
/// (index, resolution): <index>_<resolution>_<method>.csv.
void run_build(const PipelineConfig& cfg);

/// breakdown: drill-down JSON for one (index, region, time); throws
/// SelfCheckError when the reconstruction check fails.
BreakdownReport run_breakdown(const PipelineConfig& cfg, const std::string& index_id,
                              const std::string& region_code, Resolution resolution,
                              int year, int sub, const std::filesystem::path& out_file);

/// export: GeoJSON property-join file for one (index, resolution, time).
void run_export(const PipelineConfig& cfg, const std::string& index_id, Resolution resolution,
                int year, int sub, const std::filesystem::path& out_file);

// Shared assembly: the panels an index build needs at one resolution
// (indicator panels read back from run_indicators output; demographics
// interpolated across the fixture span and broadcast to the resolution).
std::map<std::string, VariablePanel> load_variable_panels(const PipelineConfig& cfg,
                                                          const IndexSpec& spec, Resolution res);

/// Mortality panel for one category, crosswalked to the build level.
VariablePanel load_mortality_panel(const PipelineConfig& cfg, MortalityCategory category,
                                   const std::vector<RegionId>& targets);

std::filesystem::path indicator_panel_path(const PipelineConfig& cfg, Resolution res,
                                           const std::string& variable_id);
std::filesystem::path index_result_path(const PipelineConfig& cfg, const std::string& index_id,
                                        Resolution res, IndexMethod method);
std::filesystem::path weight_table_path(const PipelineConfig& cfg, const std::string& index_id);

} // namespace enhvi::pipeline
