#include "enhvi/ingest.hpp"
#include "enhvi/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace enhvi;

namespace {

const TimeKey kT{Resolution::Daily, 2017, 32};

GridSeries two_cell_grid(std::optional<double> a, std::optional<double> b) {
    GridSeries g;
    g.resolution = Resolution::Daily;
    g.values[{"A", kT}] = a;
    g.values[{"B", kT}] = b;
    return g;
}

CellWeightTable two_cell_weights() {
    CellWeightTable w;
    w.entries.push_back({"A", RegionId{"R000", Level::SA2}, 0.25});
    w.entries.push_back({"B", RegionId{"R000", Level::SA2}, 0.75});
    return w;
}

} // namespace

TEST_CASE("zonal aggregate: weighted mean, renormalization, missingness") {
    auto w = two_cell_weights();

    auto r1 = zonal_aggregate(two_cell_grid(10.0, 20.0), w, "pm25");
    CHECK(*r1.panel.at(RegionId{"R000", Level::SA2}, kT) == doctest::Approx(17.5));

    auto r2 = zonal_aggregate(two_cell_grid(10.0, std::nullopt), w, "pm25");
    CHECK(*r2.panel.at(RegionId{"R000", Level::SA2}, kT) == doctest::Approx(10.0));

    auto r3 = zonal_aggregate(two_cell_grid(std::nullopt, std::nullopt), w, "pm25");
    CHECK_FALSE(r3.panel.at(RegionId{"R000", Level::SA2}, kT).has_value());
}

TEST_CASE("zonal aggregate: region with no cells in the grid yields a diagnostic") {
    auto w = two_cell_weights();
    w.entries.push_back({"Z", RegionId{"R001", Level::SA2}, 1.0});
    auto r = zonal_aggregate(two_cell_grid(10.0, 20.0), w, "pm25");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].find("R001") != std::string::npos);
    CHECK_FALSE(r.panel.at(RegionId{"R001", Level::SA2}, kT).has_value());
}

TEST_CASE("zonal aggregate properties: permutation invariance, constants, linearity") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 50.0);

    CellWeightTable w;
    const RegionId region{"R000", Level::SA2};
    std::vector<std::string> cells{"C0", "C1", "C2", "C3", "C4"};
    double acc = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double wi = (i + 1 == cells.size()) ? 1.0 - acc : 0.13 + 0.02 * i;
        acc += wi;
        w.entries.push_back({cells[i], region, wi});
    }
    w.validate();

    GridSeries g1, g2;
    g1.resolution = g2.resolution = Resolution::Daily;
    for (const auto& c : cells) {
        g1.values[{c, kT}] = u(rng);
        g2.values[{c, kT}] = u(rng);
    }

    // permutation of the weight rows
    auto shuffled = w;
    std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
    CHECK(*zonal_aggregate(g1, w, "x").panel.at(region, kT) ==
          *zonal_aggregate(g1, shuffled, "x").panel.at(region, kT));

    // constant grid → exactly that constant
    GridSeries constant;
    constant.resolution = Resolution::Daily;
    for (const auto& c : cells) constant.values[{c, kT}] = 7.25;
    CHECK(*zonal_aggregate(constant, w, "x").panel.at(region, kT) == 7.25);

    // linearity when missingness patterns match
    const double a = 2.5, b = -1.25;
    GridSeries combo;
    combo.resolution = Resolution::Daily;
    for (const auto& c : cells)
        combo.values[{c, kT}] = a * *g1.values[{c, kT}] + b * *g2.values[{c, kT}];
    const double lhs = *zonal_aggregate(combo, w, "x").panel.at(region, kT);
    const double rhs = a * *zonal_aggregate(g1, w, "x").panel.at(region, kT) +
                       b * *zonal_aggregate(g2, w, "x").panel.at(region, kT);
    CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
}

TEST_CASE("cell weight table validation enforces unit sums") {
    CellWeightTable w;
    w.entries.push_back({"A", RegionId{"R000", Level::SA2}, 0.25});
    w.entries.push_back({"B", RegionId{"R000", Level::SA2}, 0.70});
    CHECK_THROWS(w.validate());
}

TEST_CASE("mortality category rates follow the cause grouping") {
    MortalityTable t;
    const RegionId sa3{"P000", Level::SA3};
    t.entries.push_back({sa3, kCauseCoronaryHeartDisease, 2014, 2019, 10.0});
    t.entries.push_back({sa3, kCauseCerebrovascularDisease, 2014, 2019, 5.0});
    t.entries.push_back({sa3, kCauseHeartFailure, 2014, 2019, 3.0});
    t.entries.push_back({sa3, kCauseCardiacArrhythmia, 2014, 2019, 2.0});
    t.entries.push_back({sa3, kCauseAllCause, 2014, 2019, 512.3});

    const TimeKey period{Resolution::Yearly, 2014, 0};
    CHECK(*mortality_category_rates(t, MortalityCategory::Heat).at(sa3, period) ==
          doctest::Approx(20.0));
    CHECK(*mortality_category_rates(t, MortalityCategory::AllCause).at(sa3, period) ==
          doctest::Approx(512.3));

    // region lacking heart failure → heat missing
    MortalityTable incomplete;
    incomplete.entries.push_back({sa3, kCauseCoronaryHeartDisease, 2014, 2019, 10.0});
    incomplete.entries.push_back({sa3, kCauseCerebrovascularDisease, 2014, 2019, 5.0});
    incomplete.entries.push_back({sa3, kCauseCardiacArrhythmia, 2014, 2019, 2.0});
    CHECK_FALSE(
        mortality_category_rates(incomplete, MortalityCategory::Heat).at(sa3, period).has_value());
}

TEST_CASE("crosswalk replicates parent values and leaves unmapped targets missing") {
    VariablePanel sa3_panel;
    sa3_panel.variable_id = "mortality_heat";
    sa3_panel.resolution = Resolution::Yearly;
    const TimeKey t{Resolution::Yearly, 2014, 0};
    sa3_panel.values[PanelKey{RegionId{"P000", Level::SA3}, t}] = 7.0;

    RegionMapping mapping;
    for (int i = 0; i < 3; ++i)
        mapping[RegionId{"R00" + std::to_string(i), Level::SA2}] = RegionId{"P000", Level::SA3};

    auto out = crosswalk_to_level(sa3_panel, mapping, Level::SA2,
                                  {RegionId{"R999", Level::SA2}});
    for (int i = 0; i < 3; ++i)
        CHECK(*out.at(RegionId{"R00" + std::to_string(i), Level::SA2}, t) == 7.0);
    CHECK_FALSE(out.at(RegionId{"R999", Level::SA2}, t).has_value());

    // identity mapping at SA3 leaves the panel unchanged
    RegionMapping identity;
    identity[RegionId{"P000", Level::SA3}] = RegionId{"P000", Level::SA3};
    auto same = crosswalk_to_level(sa3_panel, identity, Level::SA3);
    CHECK(*same.at(RegionId{"P000", Level::SA3}, t) == 7.0);
}
