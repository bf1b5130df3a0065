#pragma once

#include <string>

#include <json.hpp>

namespace transport {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

// Report skeleton shared by all subcommands.
nlohmann::json make_report(const std::string& subcommand,
                           const nlohmann::json& inputs);

// The shipped report schema (schema/report.schema.json carries the same
// document for readers).
const nlohmann::json& report_schema();

// Minimal structural validation: type / required / properties / items.
// Throws ParseError with a JSON-pointer-style path on the first mismatch.
void validate_report(const nlohmann::json& report);

// Serialization used everywhere a report is written, so identical reports
// are identical bytes.
std::string report_to_string(const nlohmann::json& report);

} // namespace transport
