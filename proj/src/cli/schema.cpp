#include "ergodyn/cli/schema.hpp"

#include <cmath>
#include <regex>

#include "ergodyn/cli/embedded_schemas.hpp"

namespace ergodyn::cli {
namespace {

using nlohmann::json;

class Validator {
 public:
  explicit Validator(const json& root) : root_(root) {}

  void check(const json& schema, const json& doc, const std::string& path) {
    if (schema.contains("$ref")) {
      check(resolve(schema["$ref"].get<std::string>()), doc, path);
      return;
    }
    if (schema.contains("type") && !type_matches(schema["type"], doc)) {
      add(path, "expected " + type_list(schema["type"]) + ", got " + kind(doc));
      return;
    }
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& v : schema["enum"]) found = found || v == doc;
      if (!found) add(path, "must be one of " + schema["enum"].dump());
    }
    if (schema.contains("oneOf")) {
      std::size_t matches = 0;
      for (const auto& alt : schema["oneOf"]) {
        Validator sub(root_);
        sub.check(alt, doc, path);
        matches += sub.issues_.empty() ? 1 : 0;
      }
      if (matches != 1) add(path, "must match exactly one allowed form");
    }
    if (doc.is_number()) check_number(schema, doc.get<double>(), path);
    if (doc.is_string() && schema.contains("pattern")) {
      if (!std::regex_search(doc.get<std::string>(), std::regex(schema["pattern"].get<std::string>()))) {
        add(path, "does not match pattern " + schema["pattern"].get<std::string>());
      }
    }
    if (doc.is_array()) check_array(schema, doc, path);
    if (doc.is_object()) check_object(schema, doc, path);
  }

  std::vector<SchemaIssue> issues_;

 private:
  const json& resolve(const std::string& ref) {
    const std::string prefix = "#/definitions/";
    if (ref.rfind(prefix, 0) != 0) throw std::runtime_error("unsupported $ref " + ref);
    return root_.at("definitions").at(ref.substr(prefix.size()));
  }

  static std::string kind(const json& doc) {
    if (doc.is_number_integer() || doc.is_number_unsigned()) return "integer";
    if (doc.is_number()) return "number";
    return doc.type_name();
  }

  static bool one_type(const std::string& t, const json& doc) {
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "null") return doc.is_null();
    if (t == "number") return doc.is_number();
    if (t == "integer") {
      if (doc.is_number_integer() || doc.is_number_unsigned()) return true;
      return doc.is_number_float() && std::floor(doc.get<double>()) == doc.get<double>();
    }
    return false;
  }

  static bool type_matches(const json& type, const json& doc) {
    if (type.is_string()) return one_type(type.get<std::string>(), doc);
    for (const auto& t : type) {
      if (one_type(t.get<std::string>(), doc)) return true;
    }
    return false;
  }

  static std::string type_list(const json& type) {
    if (type.is_string()) return type.get<std::string>();
    std::string out;
    for (const auto& t : type) out += (out.empty() ? "" : " or ") + t.get<std::string>();
    return out;
  }

  void check_number(const json& schema, double v, const std::string& path) {
    auto bound = [&](const char* key) { return schema[key].get<double>(); };
    if (schema.contains("minimum") && v < bound("minimum")) add(path, "must be >= " + schema["minimum"].dump());
    if (schema.contains("maximum") && v > bound("maximum")) add(path, "must be <= " + schema["maximum"].dump());
    if (schema.contains("exclusiveMinimum") && v <= bound("exclusiveMinimum")) {
      add(path, "must be > " + schema["exclusiveMinimum"].dump());
    }
    if (schema.contains("exclusiveMaximum") && v >= bound("exclusiveMaximum")) {
      add(path, "must be < " + schema["exclusiveMaximum"].dump());
    }
  }

  void check_array(const json& schema, const json& doc, const std::string& path) {
    if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>()) {
      add(path, "needs at least " + schema["minItems"].dump() + " items");
    }
    if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>()) {
      add(path, "allows at most " + schema["maxItems"].dump() + " items");
    }
    if (schema.contains("items")) {
      for (std::size_t i = 0; i < doc.size(); ++i) check(schema["items"], doc[i], path + "[" + std::to_string(i) + "]");
    }
  }

  void check_object(const json& schema, const json& doc, const std::string& path) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) add(path + "." + key.get<std::string>(), "is required");
      }
    }
    const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (const auto& [key, value] : doc.items()) {
      const std::string child = path + "." + key;
      if (props && props->contains(key)) {
        check((*props)[key], value, child);
      } else if (schema.contains("additionalProperties")) {
        const auto& extra = schema["additionalProperties"];
        if (extra.is_boolean() && !extra.get<bool>()) {
          add(child, "is not a recognized key");
        } else if (extra.is_object()) {
          check(extra, value, child);
        }
      }
    }
  }

  void add(const std::string& path, std::string message) { issues_.push_back({path, std::move(message)}); }

  const json& root_;
};

}  // namespace

std::vector<SchemaIssue> validate(const nlohmann::json& schema, const nlohmann::json& doc) {
  Validator v(schema);
  v.check(schema, doc, "$");
  return v.issues_;
}

std::string format_issues(const std::vector<SchemaIssue>& issues) {
  std::string out;
  for (const auto& i : issues) out += i.path + ": " + i.message + "\n";
  return out;
}

const nlohmann::json& config_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(embedded::kConfigSchema);
  return schema;
}

const nlohmann::json& report_schema() {
  static const nlohmann::json schema = nlohmann::json::parse(embedded::kReportSchema);
  return schema;
}

}  // namespace ergodyn::cli
