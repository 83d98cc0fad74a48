#pragma once

// Minimal JSON-Schema checker covering the subset the shipped report schema
// uses: $ref into #/definitions, type, enum, pattern, required, properties,
// additionalProperties, items, oneOf. Test-only.

#include <regex>
#include <string>

#include <json.hpp>

namespace schema_check {

using nlohmann::json;

inline bool validate(const json& schema, const json& value, const json& root,
                     std::string* why);

inline bool type_matches(const std::string& t, const json& v) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "number") return v.is_number();
  if (t == "integer") return v.is_number_integer();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  return false;
}

inline const json& resolve_ref(const std::string& ref, const json& root) {
  // supports "#/definitions/<name>" only
  static const json empty;
  const std::string prefix = "#/definitions/";
  if (ref.rfind(prefix, 0) != 0) return empty;
  auto it = root.find("definitions");
  if (it == root.end()) return empty;
  auto def = it->find(ref.substr(prefix.size()));
  return def == it->end() ? empty : *def;
}

inline bool validate(const json& schema, const json& value, const json& root,
                     std::string* why) {
  if (schema.contains("$ref"))
    return validate(resolve_ref(schema["$ref"].get<std::string>(), root), value,
                    root, why);
  if (schema.contains("oneOf")) {
    int hits = 0;
    for (const auto& alt : schema["oneOf"]) {
      std::string ignore;
      if (validate(alt, value, root, &ignore)) ++hits;
    }
    if (hits != 1) {
      if (why) *why = "oneOf matched " + std::to_string(hits) + " alternatives";
      return false;
    }
  }
  if (schema.contains("type") &&
      !type_matches(schema["type"].get<std::string>(), value)) {
    if (why) *why = "type mismatch, wanted " + schema["type"].get<std::string>();
    return false;
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& e : schema["enum"]) ok = ok || e == value;
    if (!ok) {
      if (why) *why = "value not in enum";
      return false;
    }
  }
  if (schema.contains("pattern") && value.is_string()) {
    std::regex re(schema["pattern"].get<std::string>());
    if (!std::regex_search(value.get<std::string>(), re)) {
      if (why) *why = "pattern mismatch for '" + value.get<std::string>() + "'";
      return false;
    }
  }
  if (value.is_object()) {
    if (schema.contains("required")) {
      for (const auto& k : schema["required"]) {
        if (!value.contains(k.get<std::string>())) {
          if (why) *why = "missing required key " + k.get<std::string>();
          return false;
        }
      }
    }
    const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
    for (auto it = value.begin(); it != value.end(); ++it) {
      if (props && props->contains(it.key())) {
        if (!validate((*props)[it.key()], it.value(), root, why)) {
          if (why) *why = "at ." + it.key() + ": " + *why;
          return false;
        }
      } else if (schema.contains("additionalProperties")) {
        if (!validate(schema["additionalProperties"], it.value(), root, why)) {
          if (why) *why = "at ." + it.key() + ": " + *why;
          return false;
        }
      }
    }
  }
  if (value.is_array() && schema.contains("items")) {
    std::size_t i = 0;
    for (const auto& el : value) {
      if (!validate(schema["items"], el, root, why)) {
        if (why) *why = "at [" + std::to_string(i) + "]: " + *why;
        return false;
      }
      ++i;
    }
  }
  return true;
}

inline bool validate(const json& schema, const json& value, std::string* why) {
  return validate(schema, value, schema, why);
}

}  // namespace schema_check
