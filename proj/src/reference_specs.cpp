#include "enhvi/reference_specs.hpp"

#include <algorithm>
#include <set>

namespace enhvi {

namespace {

const std::set<std::string> kRiskDecreasing = {
    "median_income", "hospitals",      "greenspace",     "water_bodies",
    "ndvi",          "vehicle_access", "internet_access"};

ThemeSpec theme(std::string id, std::initializer_list<const char*> vars) {
    ThemeSpec t;
    t.theme_id = std::move(id);
    for (const char* v : vars) {
        Polarity pol;
        pol.direction = kRiskDecreasing.count(v) ? PolarityDir::RiskDecreasing
                                                 : PolarityDir::RiskIncreasing;
        t.variables.emplace_back(v, pol);
    }
    return t;
}

// Sensitivity themes shared by all three indices; the health-status theme
// differs between the temperature indices and the air quality index.
std::vector<ThemeSpec> sensitivity_themes(bool air_quality) {
    std::vector<ThemeSpec> themes;
    themes.push_back(theme("socio_economic", {"population_density", "median_income",
                                              "low_income", "education_low", "unemployment"}));
    themes.push_back(theme("household_composition",
                           {"elderly", "infants", "single_parents", "unpaid_childcare",
                            "needs_assistance", "disability", "living_alone"}));
    themes.push_back(theme("language_culture", {"second_language", "indigenous"}));
    themes.push_back(theme("housing_conditions",
                           {"mobile_homes", "crowded_dwellings", "renters", "mortgage_payers"}));
    if (air_quality) {
        themes.push_back(theme("health_status", {"resp_disease", "asthma", "copd"}));
    } else {
        themes.push_back(theme("health_status", {"circulatory_disease", "high_blood_pressure",
                                                 "high_cholesterol", "cardiovascular_disease"}));
    }
    themes.push_back(theme("health_risk_factors", {"overweight", "obese", "smoker", "high_alcohol"}));
    return themes;
}

std::vector<ThemeSpec> adaptive_themes(bool air_quality) {
    std::vector<ThemeSpec> themes;
    themes.push_back(theme("health_services", {"hospitals"}));
    if (air_quality) {
        themes.push_back(theme("cool_places", {"greenspace", "ndvi"}));
    } else {
        themes.push_back(theme("cool_places", {"greenspace", "water_bodies", "ndvi"}));
    }
    themes.push_back(theme("social_connectedness", {"vehicle_access", "internet_access"}));
    return themes;
}

IndexSpec make_spec(std::string id, std::vector<ThemeSpec> exposure, bool air_quality,
                    IndexMethod method) {
    IndexSpec spec;
    spec.index_id = std::move(id);
    spec.method = method;
    spec.sub_indices.push_back({SubIndexKind::Exposure, std::move(exposure)});
    spec.sub_indices.push_back({SubIndexKind::Sensitivity, sensitivity_themes(air_quality)});
    spec.sub_indices.push_back({SubIndexKind::AdaptiveCapacity, adaptive_themes(air_quality)});
    spec.validate();
    return spec;
}

} // namespace

IndexSpec reference_heat_spec(IndexMethod method) {
    return make_spec("heat", {theme("heat_exposure", {"hist_temp_heat", "ehf"})}, false, method);
}

IndexSpec reference_cold_spec(IndexMethod method) {
    return make_spec("cold", {theme("cold_exposure", {"hist_temp_cold", "ecf"})}, false, method);
}

IndexSpec reference_air_quality_spec(IndexMethod method) {
    return make_spec("air_quality",
                     {theme("air_pollutants", {"no", "no2", "o3", "pm25"})}, true, method);
}

std::vector<IndexSpec> reference_specs(IndexMethod method) {
    return {reference_heat_spec(method), reference_cold_spec(method),
            reference_air_quality_spec(method)};
}

std::vector<std::string> reference_variable_ids() {
    std::set<std::string> seen;
    for (const auto& spec : reference_specs())
        for (const auto& vid : spec.all_variable_ids()) seen.insert(vid);
    return {seen.begin(), seen.end()};
}

bool is_risk_decreasing(const std::string& variable_id) {
    return kRiskDecreasing.count(variable_id) > 0;
}

const std::vector<std::string>& indicator_variable_ids() {
    static const std::vector<std::string> ids = {"hist_temp_heat", "ehf",  "hist_temp_cold",
                                                 "ecf",            "no",   "no2",
                                                 "o3",             "pm25"};
    return ids;
}

} // namespace enhvi
