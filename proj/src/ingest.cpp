#include "enhvi/ingest.hpp"

#include "enhvi/kernels.hpp"

#include <cmath>
#include <set>

namespace enhvi {

void CellWeightTable::validate() const {
    std::map<RegionId, double> sums;
    for (const auto& e : entries) {
        if (e.cell_id.empty()) throw std::runtime_error("cell weight table: empty cell_id");
        if (!(e.weight > 0.0 && e.weight <= 1.0))
            throw std::runtime_error("cell weight table: weight out of (0,1] for cell '" +
                                     e.cell_id + "'");
        sums[e.region] += e.weight;
    }
    for (const auto& [region, sum] : sums) {
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::runtime_error("cell weight table: weights for region '" + region.code +
                                     "' sum to " + std::to_string(sum) + ", expected 1");
    }
}

ZonalResult zonal_aggregate(const GridSeries& grid, const CellWeightTable& weights,
                            const std::string& variable_id) {
    ZonalResult result;
    result.panel.variable_id = variable_id;
    result.panel.resolution = grid.resolution;

    std::map<RegionId, std::vector<std::pair<std::string, double>>> by_region;
    for (const auto& e : weights.entries) by_region[e.region].emplace_back(e.cell_id, e.weight);

    std::set<std::pair<int, int>> time_set;
    std::set<std::string> grid_cells;
    for (const auto& [key, v] : grid.values) {
        time_set.insert({key.second.year, key.second.sub});
        grid_cells.insert(key.first);
    }

    for (const auto& [region, cells] : by_region) {
        bool any_cell_known = false;
        for (const auto& [cell, w] : cells)
            if (grid_cells.count(cell)) any_cell_known = true;
        if (!any_cell_known) {
            result.diagnostics.push_back("region '" + region.code +
                                         "': no weighted cell present in grid");
        }
        std::vector<double> vals, ws;
        for (const auto& [ys, sub] : time_set) {
            TimeKey t{grid.resolution, ys, sub};
            vals.clear();
            ws.clear();
            for (const auto& [cell, w] : cells) {
                auto it = grid.values.find({cell, t});
                if (it != grid.values.end() && it->second) {
                    vals.push_back(*it->second);
                    ws.push_back(w);
                }
            }
            std::optional<double> out;
            if (!vals.empty()) {
                // Renormalize over the non-missing cells.
                out = kernels::dot(vals, ws) / kernels::sum(ws);
            }
            result.panel.values[PanelKey{region, t}] = out;
        }
    }
    return result;
}

VariablePanel mortality_category_rates(const MortalityTable& table, MortalityCategory category) {
    VariablePanel panel;
    panel.variable_id = "mortality_" + to_string(category);
    panel.unit = "deaths_per_100k";
    panel.resolution = Resolution::Yearly;

    std::vector<std::string> needed;
    switch (category) {
    case MortalityCategory::Heat:
        needed = {kCauseCoronaryHeartDisease, kCauseCerebrovascularDisease, kCauseHeartFailure,
                  kCauseCardiacArrhythmia};
        break;
    case MortalityCategory::AirQuality:
        needed = {kCauseCopd};
        break;
    case MortalityCategory::AllCause:
        needed = {kCauseAllCause};
        break;
    }

    // (region, period_start) -> cause -> rate
    std::map<std::pair<RegionId, int>, std::map<std::string, double>> grouped;
    for (const auto& e : table.entries) grouped[{e.region, e.period_start}][e.cause] = e.rate;

    for (const auto& [key, causes] : grouped) {
        std::optional<double> out = 0.0;
        for (const auto& cause : needed) {
            auto it = causes.find(cause);
            if (it == causes.end()) {
                out = std::nullopt;
                break;
            }
            *out += it->second;
        }
        panel.values[PanelKey{key.first, TimeKey{Resolution::Yearly, key.second, 0}}] = out;
    }
    return panel;
}

VariablePanel crosswalk_to_level(const VariablePanel& panel, const RegionMapping& mapping,
                                 Level target_level, const std::vector<RegionId>& targets) {
    VariablePanel out;
    out.variable_id = panel.variable_id;
    out.unit = panel.unit;
    out.resolution = panel.resolution;
    const auto times = panel.times();
    for (const auto& [target, source] : mapping) {
        if (target.level != target_level) continue;
        for (const auto& t : times) out.values[PanelKey{target, t}] = panel.at(source, t);
    }
    for (const auto& target : targets) {
        if (target.level != target_level || mapping.count(target)) continue;
        for (const auto& t : times) out.values[PanelKey{target, t}] = std::nullopt;
    }
    return out;
}

} // namespace enhvi
