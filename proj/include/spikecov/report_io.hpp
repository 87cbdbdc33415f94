#pragma once

#include "spikecov/absorption.hpp"
#include "spikecov/analysis.hpp"
#include "spikecov/experiment.hpp"
#include "spikecov/validation.hpp"

#include "json.hpp"

#include <iosfwd>
#include <string>

namespace spikecov {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// Worker counts are deliberately left out so output does not depend on them.
Json to_json(const ExperimentReport& report);
Json to_json(const AnalysisReport& report);
Json to_json(const RollingReport& report);
Json to_json(const ValidationReport& report);

/// Two-space indent, trailing newline. NaN is written as null.
std::string dump_json(const Json& j);

void write_csv(std::ostream& out, const ExperimentReport& report);
void write_csv(std::ostream& out, const AnalysisReport& report);
void write_csv(std::ostream& out, const RollingReport& report);
void write_csv(std::ostream& out, const ValidationReport& report);

/// Shortest round-trip decimal form; empty for NaN.
std::string format_number(double v);

}  // namespace spikecov
