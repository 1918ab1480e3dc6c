#pragma once

#include "enhvi/ingest.hpp"
#include "enhvi/types.hpp"

#include <filesystem>
#include <string>

namespace enhvi::io {

/// Shortest round-trip decimal form (std::to_chars); parses back bit-exactly.
std::string format_value(double v);

// Panel CSV: region_code,level,resolution,year,sub,value with an empty
// value field marking missing. UTF-8, '\n' line endings.
VariablePanel read_panel_csv(const std::filesystem::path& path,
                             const std::string& variable_id = "");
void write_panel_csv(const VariablePanel& panel, const std::filesystem::path& path);

// GridSeries CSV: cell_id,resolution,year,sub,value
GridSeries read_grid_csv(const std::filesystem::path& path);
void write_grid_csv(const GridSeries& grid, const std::filesystem::path& path);

// CellWeightTable CSV: cell_id,region_code,level,weight
CellWeightTable read_cell_weights_csv(const std::filesystem::path& path);
void write_cell_weights_csv(const CellWeightTable& table, const std::filesystem::path& path);

// Mortality CSV: region_code,cause,period_start,period_end,rate (SA3)
MortalityTable read_mortality_csv(const std::filesystem::path& path);
void write_mortality_csv(const MortalityTable& table, const std::filesystem::path& path);

// Crosswalk CSV: target_code,target_level,source_code,source_level
RegionMapping read_crosswalk_csv(const std::filesystem::path& path);
void write_crosswalk_csv(const RegionMapping& mapping, const std::filesystem::path& path);

// JSON documents
IndexSpec read_index_spec(const std::filesystem::path& path);
void write_index_spec(const IndexSpec& spec, const std::filesystem::path& path);
WeightTable read_weight_table(const std::filesystem::path& path);
void write_weight_table(const WeightTable& table, const std::filesystem::path& path);

} // namespace enhvi::io
