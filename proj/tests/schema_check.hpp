#pragma once

// Minimal structural JSON-schema validator for the shipped schema files:
// supports type, required, properties, items and enum.

#include "json.hpp"

#include <string>

namespace kdvspec_test {

inline bool type_matches(const nlohmann::json& doc, const std::string& type) {
    if (type == "object") return doc.is_object();
    if (type == "array") return doc.is_array();
    if (type == "string") return doc.is_string();
    if (type == "number") return doc.is_number();
    if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
    if (type == "boolean") return doc.is_boolean();
    if (type == "null") return doc.is_null();
    return false;
}

inline bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema,
                            std::string* err, const std::string& where = "$") {
    if (schema.contains("type")) {
        const auto& t = schema["type"];
        bool ok = false;
        if (t.is_string()) {
            ok = type_matches(doc, t.get<std::string>());
        } else {
            for (const auto& tt : t) ok = ok || type_matches(doc, tt.get<std::string>());
        }
        if (!ok) {
            if (err) *err = where + ": type mismatch";
            return false;
        }
    }
    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& v : schema["enum"]) ok = ok || v == doc;
        if (!ok) {
            if (err) *err = where + ": not in enum";
            return false;
        }
    }
    if (doc.is_object()) {
        if (schema.contains("required")) {
            for (const auto& key : schema["required"]) {
                if (!doc.contains(key.get<std::string>())) {
                    if (err) *err = where + ": missing required key " + key.get<std::string>();
                    return false;
                }
            }
        }
        if (schema.contains("properties")) {
            for (auto it = schema["properties"].begin(); it != schema["properties"].end();
                 ++it) {
                if (!doc.contains(it.key())) continue;
                if (!validate_schema(doc[it.key()], it.value(), err, where + "." + it.key()))
                    return false;
            }
        }
    }
    if (doc.is_array() && schema.contains("items")) {
        size_t i = 0;
        for (const auto& el : doc) {
            if (!validate_schema(el, schema["items"], err,
                                 where + "[" + std::to_string(i) + "]"))
                return false;
            ++i;
        }
    }
    return true;
}

}  // namespace kdvspec_test
