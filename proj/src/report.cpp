#include "transport/report.hpp"

#include "transport/errors.hpp"

namespace transport {

using nlohmann::json;

json make_report(const std::string& subcommand, const json& inputs) {
    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["tool_version"] = kToolVersion;
    report["subcommand"] = subcommand;
    report["inputs"] = inputs;
    report["warnings"] = json::array();
    return report;
}

namespace {

const char* kSchemaText = R"JSON({
  "type": "object",
  "required": ["schema_version", "tool_version", "subcommand", "inputs", "warnings"],
  "properties": {
    "schema_version": {"type": "integer"},
    "tool_version": {"type": "string"},
    "subcommand": {"type": "string"},
    "inputs": {"type": "object"},
    "warnings": {"type": "array", "items": {"type": "string"}},
    "verdict": {
      "type": "object",
      "properties": {
        "transportable": {"type": "boolean"},
        "witness_set": {"type": "array", "items": {"type": "string"}},
        "reason": {"type": "string"}
      }
    },
    "dsep": {
      "type": "object",
      "required": ["x", "y", "given", "separated"],
      "properties": {
        "x": {"type": "string"},
        "y": {"type": "string"},
        "given": {"type": "array", "items": {"type": "string"}},
        "separated": {"type": "boolean"}
      }
    },
    "adjustment_sets": {
      "type": "array",
      "items": {"type": "array", "items": {"type": "string"}}
    },
    "baseline_reduction": {
      "type": "object",
      "properties": {"ok": {"type": "boolean"}, "reason": {"type": "string"}}
    },
    "estimate": {
      "type": "object",
      "required": ["approach", "assumptions"],
      "properties": {
        "approach": {"type": "string"},
        "assumptions": {"type": "string"},
        "target_risk1": {"type": "number"},
        "target_risk0": {"type": "number"},
        "measures": {"type": "object"},
        "weights": {"type": "object"},
        "per_stratum": {"type": "array", "items": {"type": "object"}}
      }
    },
    "cost": {
      "type": "object",
      "properties": {
        "per_stratum": {"type": "array", "items": {"type": "object"}},
        "standardized": {"type": "object"},
        "prediction": {"type": "object"}
      }
    },
    "claim": {
      "type": "object",
      "required": ["kind", "holds", "max_residual"],
      "properties": {
        "kind": {"type": "string"},
        "conditioning": {"type": "array", "items": {"type": "string"}},
        "holds": {"type": "boolean"},
        "max_residual": {"type": "number"},
        "residuals": {"type": "array", "items": {"type": "object"}}
      }
    },
    "fit": {
      "type": "object",
      "required": ["converged", "coefficients"],
      "properties": {
        "converged": {"type": "boolean"},
        "iterations": {"type": "integer"},
        "deviance": {"type": "number"},
        "coefficients": {"type": "object"},
        "standard_errors": {"type": "object"}
      }
    },
    "wald": {
      "type": "object",
      "required": ["statistic", "dof", "p_value", "reject"],
      "properties": {
        "statistic": {"type": "number"},
        "dof": {"type": "integer"},
        "p_value": {"type": "number"},
        "reject": {"type": "boolean"}
      }
    },
    "simulation": {
      "type": "object",
      "properties": {
        "files": {"type": "object"},
        "replicates": {"type": "integer"},
        "rejection_rate": {"type": "number"}
      }
    }
  }
})JSON";

void validate_node(const json& value, const json& schema, const std::string& path) {
    if (schema.contains("type")) {
        const std::string& type = schema["type"].get_ref<const std::string&>();
        bool ok = (type == "object" && value.is_object()) ||
                  (type == "array" && value.is_array()) ||
                  (type == "string" && value.is_string()) ||
                  (type == "integer" && value.is_number_integer()) ||
                  (type == "number" && value.is_number()) ||
                  (type == "boolean" && value.is_boolean());
        if (!ok)
            throw ParseError("report field '" + path + "' is not of type " + type);
    }
    if (schema.contains("required")) {
        for (const auto& req : schema["required"])
            if (!value.contains(req.get<std::string>()))
                throw ParseError("report field '" + path + "' misses required key '" +
                                 req.get<std::string>() + "'");
    }
    if (schema.contains("properties") && value.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items())
            if (value.contains(key)) validate_node(value[key], sub, path + "/" + key);
    }
    if (schema.contains("items") && value.is_array()) {
        int i = 0;
        for (const auto& item : value)
            validate_node(item, schema["items"], path + "/" + std::to_string(i++));
    }
}

} // namespace

const json& report_schema() {
    static const json schema = json::parse(kSchemaText);
    return schema;
}

void validate_report(const json& report) {
    validate_node(report, report_schema(), "");
}

std::string report_to_string(const json& report) {
    return report.dump(2) + "\n";
}

} // namespace transport
