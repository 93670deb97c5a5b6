#pragma once

// Validator for the JSON Schema subset used by the published config and report
// schemas: type, enum, properties, required, additionalProperties, items,
// minItems/maxItems, minimum/maximum (and exclusive forms), pattern, oneOf and
// local $ref into #/definitions.

#include <string>
#include <vector>

#include "json.hpp"

namespace ergodyn::cli {

struct SchemaIssue {
  std::string path;  // "$.partition.m"
  std::string message;
};

std::vector<SchemaIssue> validate(const nlohmann::json& schema, const nlohmann::json& doc);

std::string format_issues(const std::vector<SchemaIssue>& issues);

// Published schemas, embedded at build time.
const nlohmann::json& config_schema();
const nlohmann::json& report_schema();

}  // namespace ergodyn::cli
