#include "enhvi/index.hpp"
#include "enhvi/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace enhvi;

namespace {

const TimeKey kT{Resolution::Yearly, 2017, 0};

RegionId region(int i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "R%03d", i);
    return RegionId{buf, Level::SA2};
}

ThemeSpec theme(std::string id, std::vector<std::string> vars) {
    ThemeSpec t;
    t.theme_id = std::move(id);
    for (auto& v : vars) t.variables.emplace_back(std::move(v), Polarity{});
    return t;
}

/// exposure {exp: e1}, sensitivity {sen: s1,s2,s3}, adaptive {adc: a1}
IndexSpec tiny_spec(IndexMethod m) {
    IndexSpec spec;
    spec.index_id = "tiny";
    spec.method = m;
    spec.sub_indices.push_back({SubIndexKind::Exposure, {theme("exp", {"e1"})}});
    spec.sub_indices.push_back({SubIndexKind::Sensitivity, {theme("sen", {"s1", "s2", "s3"})}});
    spec.sub_indices.push_back({SubIndexKind::AdaptiveCapacity, {theme("adc", {"a1"})}});
    return spec;
}

VariablePanel panel_of(const std::string& vid, const std::vector<std::optional<double>>& vals) {
    VariablePanel p;
    p.variable_id = vid;
    p.resolution = Resolution::Yearly;
    for (std::size_t i = 0; i < vals.size(); ++i)
        p.values[PanelKey{region(static_cast<int>(i)), kT}] = vals[i];
    return p;
}

BuildContext random_ctx(IndexMethod m, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    BuildContext ctx;
    ctx.spec = tiny_spec(m);
    for (const auto& vid : ctx.spec.all_variable_ids()) {
        std::vector<std::optional<double>> vals(n);
        for (auto& v : vals) v = u(rng);
        ctx.panels[vid] = panel_of(vid, vals);
    }
    ctx.missing_policy = MissingPolicy::propagate();
    return ctx;
}

WeightTable unit_weights(const IndexSpec& spec) {
    WeightTable w;
    for (const auto& sub : spec.sub_indices)
        for (const auto& t : sub.themes)
            for (const auto& [vid, pol] : t.variables)
                w.entries[WeightKey{vid, t.theme_id, sub.kind}] = 1.0;
    return w;
}

std::vector<std::optional<double>> percentiles_of(const std::vector<std::optional<double>>& v) {
    return stats::spatial_percentile(v);
}

} // namespace

TEST_CASE("apply_polarity negates risk-decreasing values and reverses ranks") {
    auto p = panel_of("income", {50.0, 20.0, 80.0});
    auto negated = apply_polarity(p, Polarity{PolarityDir::RiskDecreasing});
    CHECK(*negated.at(region(0), kT) == -50.0);
    auto same = apply_polarity(p, Polarity{PolarityDir::RiskIncreasing});
    CHECK(*same.at(region(0), kT) == 50.0);

    std::vector<std::optional<double>> raw{50.0, 20.0, 80.0};
    std::vector<std::optional<double>> neg{-50.0, -20.0, -80.0};
    auto pr = percentiles_of(raw);
    auto pn = percentiles_of(neg);
    for (std::size_t i = 0; i < raw.size(); ++i) CHECK(*pn[i] == 1.0 - *pr[i]);
}

TEST_CASE("equal_sum sub-index: single term, duplicates, mean fill") {
    BuildContext ctx = random_ctx(IndexMethod::EqualSum, 5, 61);

    // one variable: the sub-index is that variable's percentile
    auto exp_sub = equal_sum_subindex(ctx, SubIndexKind::Exposure, kT);
    std::vector<std::optional<double>> e1(5);
    for (int i = 0; i < 5; ++i) e1[i] = ctx.panels.at("e1").at(region(i), kT);
    auto pct = percentiles_of(e1);
    for (int i = 0; i < 5; ++i) CHECK(*exp_sub.at(region(i)) == *pct[i]);

    // two identical variables double the sum
    BuildContext dup = ctx;
    dup.spec.sub_indices[0].themes[0].variables.emplace_back("e1b", Polarity{});
    dup.panels["e1b"] = ctx.panels.at("e1");
    dup.panels["e1b"].variable_id = "e1b";
    auto doubled = equal_sum_subindex(dup, SubIndexKind::Exposure, kT);
    for (int i = 0; i < 5; ++i) CHECK(*doubled.at(region(i)) == doctest::Approx(2 * *pct[i]));

    // mean_fill: a missing percentile becomes the mean of the others
    BuildContext fill = ctx;
    fill.missing_policy = MissingPolicy::mean_fill();
    fill.panels.at("s2").values[PanelKey{region(0), kT}] = std::nullopt;
    auto sens = equal_sum_subindex(fill, SubIndexKind::Sensitivity, kT);

    std::vector<std::optional<double>> s1(5), s2(5), s3(5);
    for (int i = 0; i < 5; ++i) {
        s1[i] = fill.panels.at("s1").at(region(i), kT);
        s2[i] = fill.panels.at("s2").at(region(i), kT);
        s3[i] = fill.panels.at("s3").at(region(i), kT);
    }
    auto p1 = percentiles_of(s1), p2 = percentiles_of(s2), p3 = percentiles_of(s3);
    const double fill_value = (*p1[0] + *p3[0]) / 2.0;
    CHECK(*sens.at(region(0)) == doctest::Approx(*p1[0] + fill_value + *p3[0]).epsilon(1e-12));

    // propagate: the same region goes missing instead
    BuildContext prop = fill;
    prop.missing_policy = MissingPolicy::propagate();
    auto strict = equal_sum_subindex(prop, SubIndexKind::Sensitivity, kT);
    CHECK_FALSE(strict.at(region(0)).has_value());
}

TEST_CASE("equal_sum overall index sums the three sub-index percentiles") {
    BuildContext ctx = random_ctx(IndexMethod::EqualSum, 8, 62);
    auto result = build_index(ctx);
    for (const auto& [key, cell] : result.cells) {
        REQUIRE(cell.overall.has_value());
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
            REQUIRE(cell.sub_percentile[k].has_value());
            sum += *cell.sub_percentile[k];
        }
        CHECK(std::abs(*cell.overall - sum) < 1e-12);
        CHECK(*cell.overall >= 0.0);
        CHECK(*cell.overall <= 3.0);
    }
}

TEST_CASE("themed sub-index: rank idempotence and theme duplication") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 7, 63);

    // one theme, one variable: percentile of a percentile preserves values
    auto adc = themed_subindex(ctx, SubIndexKind::AdaptiveCapacity, kT, false);
    std::vector<std::optional<double>> a1(7);
    for (int i = 0; i < 7; ++i) a1[i] = ctx.panels.at("a1").at(region(i), kT);
    auto pct = percentiles_of(a1);
    for (int i = 0; i < 7; ++i) CHECK(*adc.at(region(i)) == *pct[i]);

    // duplicating a theme leaves the mean unchanged
    BuildContext dup = ctx;
    dup.spec.sub_indices[2].themes.push_back(dup.spec.sub_indices[2].themes[0]);
    dup.spec.sub_indices[2].themes[1].theme_id = "adc2";
    auto twice = themed_subindex(dup, SubIndexKind::AdaptiveCapacity, kT, false);
    for (int i = 0; i < 7; ++i) CHECK(*twice.at(region(i)) == doctest::Approx(*adc.at(region(i))));
}

TEST_CASE("themed sub-index: fully missing variable reduces N_pt") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 6, 64);
    for (int i = 0; i < 6; ++i)
        ctx.panels.at("s2").values[PanelKey{region(i), kT}] = std::nullopt;

    auto sens = themed_subindex(ctx, SubIndexKind::Sensitivity, kT, false);

    // hand computation with N_pt = 2 (s1 and s3 only)
    std::vector<std::optional<double>> s1(6), s3(6), inner(6);
    for (int i = 0; i < 6; ++i) {
        s1[i] = ctx.panels.at("s1").at(region(i), kT);
        s3[i] = ctx.panels.at("s3").at(region(i), kT);
    }
    auto p1 = percentiles_of(s1), p3 = percentiles_of(s3);
    for (int i = 0; i < 6; ++i) inner[i] = (*p1[i] + *p3[i]) / 2.0;
    auto expected = percentiles_of(inner);
    for (int i = 0; i < 6; ++i)
        CHECK(std::abs(*sens.at(region(i)) - *expected[i]) < 1e-12);
}

TEST_CASE("themed sub-index: theme with zero usable variables is dropped with a diagnostic") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 5, 65);
    ctx.spec.sub_indices[1].themes.push_back(theme("ghost", {"g1"}));
    ctx.panels["g1"] = panel_of("g1", {std::nullopt, std::nullopt, std::nullopt, std::nullopt,
                                       std::nullopt});
    std::vector<std::string> diags;
    auto with_ghost = themed_subindex(ctx, SubIndexKind::Sensitivity, kT, false, &diags);
    REQUIRE(diags.size() == 1);
    CHECK(diags[0].find("ghost") != std::string::npos);

    BuildContext base = random_ctx(IndexMethod::EqualThemed, 5, 65);
    auto without = themed_subindex(base, SubIndexKind::Sensitivity, kT, false);
    for (int i = 0; i < 5; ++i) CHECK(*with_ghost.at(region(i)) == *without.at(region(i)));
}

TEST_CASE("themed overall index stays in [0,1] and averages the sub-index percentiles") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 9, 66);
    auto result = build_index(ctx);
    for (const auto& [key, cell] : result.cells) {
        REQUIRE(cell.overall.has_value());
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) sum += *cell.sub_percentile[k];
        CHECK(std::abs(*cell.overall - sum / 3.0) < 1e-12);
        CHECK(*cell.overall >= 0.0);
        CHECK(*cell.overall <= 1.0);
    }
}

TEST_CASE("weighted pipeline with unit weights equals the themed pipeline bit for bit") {
    BuildContext themed = random_ctx(IndexMethod::EqualThemed, 12, 67);
    BuildContext weighted = themed;
    weighted.spec.method = IndexMethod::Weighted;
    weighted.weights = unit_weights(weighted.spec);

    auto a = build_index(themed);
    auto b = build_index(weighted);
    REQUIRE(a.cells.size() == b.cells.size());
    for (const auto& [key, cell] : a.cells) {
        const auto& other = b.cells.at(key);
        CHECK(*cell.overall == *other.overall);  // exact
        for (int k = 0; k < 3; ++k) CHECK(*cell.sub_percentile[k] == *other.sub_percentile[k]);
    }
}

TEST_CASE("all-zero weights tie a theme at percentile 0.5") {
    BuildContext ctx = random_ctx(IndexMethod::Weighted, 6, 68);
    auto w = unit_weights(ctx.spec);
    for (auto& [key, value] : w.entries)
        if (key.sub_index == SubIndexKind::Sensitivity) value = 0.0;
    ctx.weights = w;
    auto sens = themed_subindex(ctx, SubIndexKind::Sensitivity, kT, true);
    for (int i = 0; i < 6; ++i) CHECK(*sens.at(region(i)) == 0.5);
}

TEST_CASE("negating a one-variable theme's weight reverses its ordering") {
    BuildContext ctx = random_ctx(IndexMethod::Weighted, 8, 69);
    auto w = unit_weights(ctx.spec);
    ctx.weights = w;
    auto pos = themed_subindex(ctx, SubIndexKind::AdaptiveCapacity, kT, true);
    w.entries[WeightKey{"a1", "adc", SubIndexKind::AdaptiveCapacity}] = -1.0;
    ctx.weights = w;
    auto neg = themed_subindex(ctx, SubIndexKind::AdaptiveCapacity, kT, true);
    for (int i = 0; i < 8; ++i) CHECK(*neg.at(region(i)) == doctest::Approx(1.0 - *pos.at(region(i))));
}

TEST_CASE("compute_weights: concordance, exposure pinning, undefined fallback") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 30, 70);
    // s3 constant → undefined correlation
    for (auto& [key, value] : ctx.panels.at("s3").values) value = 5.0;

    // mortality = monotone function of s1
    VariablePanel mortality;
    mortality.variable_id = "mortality_all_cause";
    mortality.resolution = Resolution::Yearly;
    for (int i = 0; i < 30; ++i) {
        const double s1 = *ctx.panels.at("s1").at(region(i), kT);
        mortality.values[PanelKey{region(i), kT}] = 100.0 + 3.0 * s1;
    }

    auto w = compute_weights(ctx, mortality, MortalityCategory::AllCause);
    CHECK(w.at("s1", "sen", SubIndexKind::Sensitivity) == doctest::Approx(1.0));
    CHECK(w.at("e1", "exp", SubIndexKind::Exposure) == 1.0);
    CHECK(w.at("s3", "sen", SubIndexKind::Sensitivity) == 0.0);
    REQUIRE(w.diagnostics.size() == 1);
    CHECK(w.diagnostics[0].find("s3") != std::string::npos);

    VariablePanel empty;
    CHECK_THROWS(compute_weights(ctx, empty, MortalityCategory::AllCause));
}

TEST_CASE("compute_weights: independent variable stays within the tau null band") {
    const int n = 400;
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, n, 72);
    VariablePanel mortality;
    mortality.resolution = Resolution::Yearly;
    for (int i = 0; i < n; ++i) mortality.values[PanelKey{region(i), kT}] = u(rng);
    auto w = compute_weights(ctx, mortality, MortalityCategory::AllCause);
    const double se = std::sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)));
    CHECK(std::abs(w.at("s1", "sen", SubIndexKind::Sensitivity)) < 3.0 * se);
}

TEST_CASE("index invariants: monotone maps, scaling, region permutation, determinism") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 15, 73);
    auto base = build_index(ctx);

    // strictly increasing transform of every raw variable
    BuildContext mapped = ctx;
    for (auto& [vid, panel] : mapped.panels)
        for (auto& [key, v] : panel.values)
            if (v) v = std::exp(*v / 50.0);
    auto transformed = build_index(mapped);
    // positive rescale of one variable
    BuildContext scaled = ctx;
    for (auto& [key, v] : scaled.panels.at("s2").values)
        if (v) v = 2.0 * *v + 7.0;
    auto rescaled = build_index(scaled);
    // determinism
    auto again = build_index(ctx);

    for (const auto& [key, cell] : base.cells) {
        CHECK(*transformed.cells.at(key).overall == *cell.overall);
        CHECK(*rescaled.cells.at(key).overall == *cell.overall);
        CHECK(*again.cells.at(key).overall == *cell.overall);
    }
}

TEST_CASE("breakdown: reconstruction, flags, and missing transparency") {
    BuildContext ctx = random_ctx(IndexMethod::EqualThemed, 10, 74);
    ctx.missing_policy = MissingPolicy::mean_fill();
    ctx.panels.at("s2").values[PanelKey{region(3), kT}] = std::nullopt;
    auto result = build_index(ctx);

    auto report = breakdown(result, ctx, region(3), kT);
    CHECK(report.reconstruction_error < 1e-9);
    CHECK(report.sub_indices.size() == 3);
    CHECK(report.themes.size() == 3);
    CHECK(report.variables.size() == 5);
    for (const auto& v : report.variables) {
        if (v.variable_id == "s2") CHECK_FALSE(v.percentile.has_value());
        else CHECK(v.percentile.has_value());
        if (v.percentile) CHECK(v.above_median == (*v.percentile >= 0.5));
    }

    CHECK_THROWS(breakdown(result, ctx, RegionId{"nope", Level::SA2}, kT));
    CHECK_THROWS(breakdown(result, ctx, region(0), TimeKey{Resolution::Yearly, 1990, 0}));
}
