#include <cinttypes>
#include <cstdio>
#include <string>

#include "embedded_data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/extfm.hpp"
#include "json.hpp"

namespace fairbench::extfm {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kFormatVersion = 1;

std::string req_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw ParseError(where + ": missing string field '" + key + "'");
    }
    return it->get<std::string>();
}

std::string opt_string(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) throw ParseError(where + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ParseError(where + ": field '" + key + "' must be a number");
    return it->get<double>();
}

bool opt_bool(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return false;
    if (!it->is_boolean()) throw ParseError(where + ": field '" + key + "' must be a boolean");
    return it->get<bool>();
}

const json& req_array(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
        throw ParseError(std::string("feature model: missing array '") + key + "'");
    }
    return *it;
}

AttributeKind parse_attribute_kind(const std::string& s, const std::string& where) {
    if (s == "text") return AttributeKind::text;
    if (s == "number") return AttributeKind::number;
    if (s == "enumeration") return AttributeKind::enumeration;
    if (s == "number_list") return AttributeKind::number_list;
    throw ParseError(where + ": unknown attribute kind '" + s + "'");
}

}  // namespace

FeatureModel load_feature_model() { return load_feature_model(builtin_model_document()); }

std::string_view builtin_model_document() { return fairbench::embedded::workflow_model_json; }

FeatureModel load_feature_model(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("feature model document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("feature model document must be a JSON object");
    if (auto v = doc.find("format_version"); v != doc.end()) {
        if (!v->is_number_integer() || v->get<int>() != kFormatVersion) {
            throw ParseError("unsupported feature model format_version (expected 1)");
        }
    }

    std::vector<Feature> features;
    for (const auto& f : req_array(doc, "features")) {
        const std::string where = "feature #" + std::to_string(features.size());
        if (!f.is_object()) throw ParseError(where + ": must be an object");
        Feature feat;
        feat.id = req_string(f, "id", where);
        feat.name = opt_string(f, "name", where);
        if (feat.name.empty()) feat.name = feat.id;
        if (auto p = f.find("parent"); p != f.end() && !p->is_null()) {
            if (!p->is_string()) throw ParseError(where + ": parent must be a string");
            feat.parent = p->get<std::string>();
        }
        const std::string var = opt_string(f, "variability", where);
        if (var.empty() || var == "optional") {
            feat.variability = feat.parent ? Variability::optional : Variability::mandatory;
        } else if (var == "mandatory") {
            feat.variability = Variability::mandatory;
        } else {
            throw ParseError(where + ": unknown variability '" + var + "'");
        }
        if (var == "optional" && !feat.parent) feat.variability = Variability::optional;
        feat.description = opt_string(f, "description", where);
        features.push_back(std::move(feat));
    }

    std::vector<Group> groups;
    if (doc.contains("groups")) {
        for (const auto& g : req_array(doc, "groups")) {
            const std::string where = "group #" + std::to_string(groups.size());
            if (!g.is_object()) throw ParseError(where + ": must be an object");
            Group group;
            group.parent = req_string(g, "parent", where);
            const std::string kind = req_string(g, "kind", where);
            if (kind == "alternative") {
                group.kind = GroupKind::alternative;
            } else if (kind == "or") {
                group.kind = GroupKind::any_of;
            } else {
                throw ParseError(where + ": unknown group kind '" + kind + "'");
            }
            auto members = g.find("members");
            if (members == g.end() || !members->is_array()) throw ParseError(where + ": missing members");
            for (const auto& m : *members) {
                if (!m.is_string()) throw ParseError(where + ": members must be strings");
                group.members.push_back(m.get<std::string>());
            }
            groups.push_back(std::move(group));
        }
    }

    std::vector<AttributeDecl> attributes;
    if (doc.contains("attributes")) {
        for (const auto& a : req_array(doc, "attributes")) {
            const std::string where = "attribute #" + std::to_string(attributes.size());
            if (!a.is_object()) throw ParseError(where + ": must be an object");
            AttributeDecl decl;
            decl.owner = req_string(a, "owner", where);
            decl.name = req_string(a, "name", where);
            decl.display_name = opt_string(a, "display_name", where);
            if (decl.display_name.empty()) decl.display_name = decl.name;
            decl.kind = parse_attribute_kind(req_string(a, "kind", where), where);
            decl.required = opt_bool(a, "required", where);
            if (auto c = a.find("choices"); c != a.end()) {
                for (const auto& choice : *c) decl.choices.push_back(choice.get<std::string>());
            }
            decl.min = opt_number(a, "min", where);
            decl.max = opt_number(a, "max", where);
            decl.integer = opt_bool(a, "integer", where);
            decl.exclusive_min = opt_bool(a, "exclusive_min", where);
            if (auto d = opt_string(a, "default", where); !d.empty()) decl.default_value = d;
            if (auto l = opt_string(a, "list_length_of", where); !l.empty()) decl.list_length_of = l;
            decl.description = opt_string(a, "description", where);
            attributes.push_back(std::move(decl));
        }
    }

    std::vector<CrossConstraint> constraints;
    if (doc.contains("constraints")) {
        for (const auto& c : req_array(doc, "constraints")) {
            const std::string where = "constraint #" + std::to_string(constraints.size());
            if (!c.is_object()) throw ParseError(where + ": must be an object");
            CrossConstraint cc;
            const std::string kind = req_string(c, "kind", where);
            if (kind == "requires") {
                cc.kind = ConstraintKind::requires_feature;
            } else if (kind == "excludes") {
                cc.kind = ConstraintKind::excludes_feature;
            } else {
                throw ParseError(where + ": unknown constraint kind '" + kind + "'");
            }
            cc.a = req_string(c, "a", where);
            cc.b = req_string(c, "b", where);
            cc.message = opt_string(c, "message", where);
            constraints.push_back(std::move(cc));
        }
    }

    return FeatureModel::build(std::move(features), std::move(groups), std::move(attributes),
                               std::move(constraints));
}

std::string to_document(const FeatureModel& model) {
    ordered_json doc;
    doc["format"] = "fairbench-feature-model";
    doc["format_version"] = kFormatVersion;

    ordered_json features = ordered_json::array();
    for (const auto& f : model.features()) {
        ordered_json j;
        j["id"] = f.id;
        j["name"] = f.name;
        if (f.parent) j["parent"] = *f.parent;
        j["variability"] = f.variability == Variability::mandatory ? "mandatory" : "optional";
        if (!f.description.empty()) j["description"] = f.description;
        features.push_back(std::move(j));
    }
    doc["features"] = std::move(features);

    ordered_json groups = ordered_json::array();
    for (const auto& g : model.groups()) {
        ordered_json j;
        j["parent"] = g.parent;
        j["kind"] = std::string(to_string(g.kind));
        j["members"] = g.members;
        groups.push_back(std::move(j));
    }
    doc["groups"] = std::move(groups);

    ordered_json attributes = ordered_json::array();
    for (const auto& a : model.attributes()) {
        ordered_json j;
        j["owner"] = a.owner;
        j["name"] = a.name;
        j["display_name"] = a.display_name;
        j["kind"] = std::string(to_string(a.kind));
        j["required"] = a.required;
        if (!a.choices.empty()) j["choices"] = a.choices;
        if (a.min) j["min"] = *a.min;
        if (a.max) j["max"] = *a.max;
        if (a.integer) j["integer"] = true;
        if (a.exclusive_min) j["exclusive_min"] = true;
        if (a.default_value) j["default"] = *a.default_value;
        if (a.list_length_of) j["list_length_of"] = *a.list_length_of;
        if (!a.description.empty()) j["description"] = a.description;
        attributes.push_back(std::move(j));
    }
    doc["attributes"] = std::move(attributes);

    ordered_json constraints = ordered_json::array();
    for (const auto& c : model.constraints()) {
        ordered_json j;
        j["kind"] = std::string(to_string(c.kind));
        j["a"] = c.a;
        j["b"] = c.b;
        j["message"] = c.message;
        constraints.push_back(std::move(j));
    }
    doc["constraints"] = std::move(constraints);
    return doc.dump(2) + "\n";
}

std::string checksum(const FeatureModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : to_document(model)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
    return buf;
}

}  // namespace fairbench::extfm
