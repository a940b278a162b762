#pragma once

// File formats and report serialization.
//
// Probability table:
//   {"n": N, "d": d, "tables": {"121": [p_0, ..., p_{d^N-1}], ...}}
// one key per setting string (all 2^N required), outcomes in mixed-radix
// order with party 1 varying fastest.
//
// Phase configuration:
//   {"n": N, "d": d, "phases": {"party-1": {"setting-1": [...], "setting-2": [...]}, ...}}
// radians, d entries per vector.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "quditbell/bounds.hpp"
#include "quditbell/optimize.hpp"
#include "quditbell/quantum.hpp"
#include "quditbell/scenario.hpp"

namespace quditbell::io {

using Json = nlohmann::ordered_json;

Json table_to_json(const JointProbabilityTable& table);
// Throws InputError naming the offending field.
JointProbabilityTable table_from_json(const Json& j);

Json phases_to_json(const PhaseConfiguration& config);
PhaseConfiguration phases_from_json(const Json& j);

// Parses text as JSON; syntax errors become InputError with line and column.
Json parse_json(const std::string& text);
Json read_json_file(const std::filesystem::path& path);

JointProbabilityTable read_table_file(const std::filesystem::path& path);
PhaseConfiguration read_phases_file(const std::filesystem::path& path);

Json strategy_to_json(const DeterministicStrategy& strategy);
Json strategy_to_json(const LocalStrategy& strategy);

Json hlnhv_report(const BellScenario& scenario, const HlnhvBound& bound, double elapsed_ms);
Json lhv_report(const BellScenario& scenario, const LhvBound& bound, double elapsed_ms);
Json violation_report_to_json(const ViolationReport& report);

// Shortest round-trip form is not wanted here: fixed 10 significant digits,
// '.' separator, no locale.
std::string format_number(double value);

// Header from `columns`; each row supplies the same keys. Numbers use
// format_number, strings are quoted only when they contain ',', '"' or a
// newline.
std::string to_csv(const std::vector<std::string>& columns, const Json& rows);

// Writes to a sibling temporary file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace quditbell::io
