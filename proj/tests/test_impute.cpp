#include "enhvi/impute.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace enhvi;

namespace {

const RegionId kA{"R000", Level::SA2};
const RegionId kB{"R001", Level::SA2};

TimeKey year(int y) { return TimeKey{Resolution::Yearly, y, 0}; }

} // namespace

TEST_CASE("interpolate_annual: interior linearity, flat tails, empty regions") {
    VariablePanel p;
    p.variable_id = "unemployment";
    p.resolution = Resolution::Yearly;
    p.values[PanelKey{kA, year(2011)}] = 4.0;
    p.values[PanelKey{kA, year(2016)}] = 6.5;
    p.values[PanelKey{kB, year(2011)}] = std::nullopt;  // region with no observations

    auto out = interpolate_annual(p, YearSpan{2011, 2019});
    CHECK(*out.at(kA, year(2011)) == 4.0);  // observations untouched
    CHECK(*out.at(kA, year(2016)) == 6.5);
    CHECK(*out.at(kA, year(2013)) == doctest::Approx(5.0));
    CHECK(*out.at(kA, year(2018)) == 6.5);  // flat extrapolation
    for (int y = 2011; y <= 2019; ++y) CHECK_FALSE(out.at(kB, year(y)).has_value());

    // single observation → constant everywhere
    VariablePanel single;
    single.resolution = Resolution::Yearly;
    single.values[PanelKey{kA, year(2016)}] = 6.5;
    auto flat = interpolate_annual(single, YearSpan{2011, 2019});
    for (int y = 2011; y <= 2019; ++y) CHECK(*flat.at(kA, year(y)) == 6.5);
}

TEST_CASE("interpolate_annual is monotone between ordered observations") {
    VariablePanel p;
    p.resolution = Resolution::Yearly;
    p.values[PanelKey{kA, year(2010)}] = 1.0;
    p.values[PanelKey{kA, year(2020)}] = 11.0;
    auto out = interpolate_annual(p, YearSpan{2010, 2020});
    double prev = 0.0;
    for (int y = 2010; y <= 2020; ++y) {
        const double v = *out.at(kA, year(y));
        CHECK(v > prev);
        CHECK(v >= 1.0);
        CHECK(v <= 11.0);
        prev = v;
    }
}

TEST_CASE("interpolation never transfers values between regions") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    VariablePanel p;
    p.resolution = Resolution::Yearly;
    for (int r = 0; r < 6; ++r) {
        RegionId region{"R00" + std::to_string(r), Level::SA2};
        p.values[PanelKey{region, year(2011)}] = u(rng);
        p.values[PanelKey{region, year(2016)}] = u(rng);
    }
    auto base = interpolate_annual(p, YearSpan{2011, 2018});

    auto perturbed = p;
    perturbed.values[PanelKey{kA, year(2011)}] = 999.0;
    auto shifted = interpolate_annual(perturbed, YearSpan{2011, 2018});

    for (const auto& [key, v] : base.values) {
        if (key.region == kA) continue;
        CHECK(*shifted.values.at(key) == *v);
    }
}

TEST_CASE("broadcast replicates yearly values to months and ISO weeks") {
    VariablePanel p;
    p.resolution = Resolution::Yearly;
    p.values[PanelKey{kA, year(2015)}] = 5.0;
    p.values[PanelKey{kB, year(2015)}] = std::nullopt;

    auto monthly = broadcast(p, Resolution::Monthly);
    int months = 0;
    for (const auto& [key, v] : monthly.values) {
        if (key.region == kA) {
            CHECK(*v == 5.0);
            ++months;
        } else {
            CHECK_FALSE(v.has_value());
        }
    }
    CHECK(months == 12);

    // 2015 has 53 ISO weeks
    auto weekly = broadcast(p, Resolution::Weekly);
    int weeks = 0;
    for (const auto& [key, v] : weekly.values)
        if (key.region == kA) ++weeks;
    CHECK(weeks == 53);
}

TEST_CASE("multiple imputation: determinism, degenerate fill, convergence") {
    std::vector<std::optional<double>> v{0.2, std::nullopt, 0.8};

    auto a = multiple_impute_percentiles(v, 5, 1234);
    auto b = multiple_impute_percentiles(v, 5, 1234);
    CHECK(a.completed == b.completed);  // bit-identical under a fixed seed
    CHECK(a.mean == b.mean);

    // degenerate observed set: deterministic fill
    std::vector<std::optional<double>> single{std::nullopt, 0.5};
    auto d = multiple_impute_percentiles(single, 7, 99);
    for (const auto& vec : d.completed) CHECK(vec[0] == 0.5);

    // mean over many draws converges to the mean fill at ~1/sqrt(m)
    auto big = multiple_impute_percentiles(v, 20000, 7);
    CHECK(big.mean[1] == doctest::Approx(0.5).epsilon(0.05));

    // all-missing input is an error
    std::vector<std::optional<double>> none{std::nullopt, std::nullopt};
    CHECK_THROWS_WITH_AS(multiple_impute_percentiles(none, 3, 1),
                         doctest::Contains("nothing to impute"), std::runtime_error);
}
