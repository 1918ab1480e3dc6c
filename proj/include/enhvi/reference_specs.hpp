#pragma once

#include "enhvi/types.hpp"

#include <vector>

namespace enhvi {

// The three shipped index compositions (heat, cold, air quality). These
// are also written to specs/*.json; the builders keep tests and the
// synthetic generator in sync with the shipped files.

IndexSpec reference_heat_spec(IndexMethod method = IndexMethod::Weighted);
IndexSpec reference_cold_spec(IndexMethod method = IndexMethod::Weighted);
IndexSpec reference_air_quality_spec(IndexMethod method = IndexMethod::Weighted);
std::vector<IndexSpec> reference_specs(IndexMethod method = IndexMethod::Weighted);

/// Variable ids appearing in any reference spec, deduplicated.
std::vector<std::string> reference_variable_ids();

/// Variables whose raw value reduces risk (negated before ranking).
bool is_risk_decreasing(const std::string& variable_id);

/// Ids of the indicator-derived variables (everything else is a
/// demographic / health-condition panel).
const std::vector<std::string>& indicator_variable_ids();

} // namespace enhvi
