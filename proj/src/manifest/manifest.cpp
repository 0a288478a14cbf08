#include <chrono>
#include <ctime>

#include <yaml-cpp/yaml.h>

#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/text.hpp"

namespace fairbench::manifest {

namespace {

using extfm::Configuration;
using extfm::FeatureModel;

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool below(const FeatureModel& model, std::size_t i, std::size_t ancestor) {
    for (std::size_t p = model.parent_of(i); p != FeatureModel::npos; p = model.parent_of(p)) {
        if (p == ancestor) return true;
    }
    return false;
}

std::string where(const YAML::Node& n) {
    const auto m = n.Mark();
    if (m.is_null()) return "";
    return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void schema_error(const std::string& what, const YAML::Node& at) {
    throw ParseError("manifest: " + what + where(at));
}

std::string scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) schema_error(what + " must be a scalar value", n);
    return n.Scalar();
}

YAML::Node require(const YAML::Node& parent, const char* key) {
    const YAML::Node n = parent[key];
    if (!n) schema_error(std::string("missing field '") + key + "'", parent);
    return n;
}

}  // namespace

std::string shell_wrapper(std::string_view manifest_path) {
    const std::string path(manifest_path);
    // Relative manifest paths resolve against the script's own directory.
    const std::string where = !path.empty() && path[0] == '/' ? path : "$(dirname \"$0\")/" + path;
    return "#!/bin/sh\nexec \"${FAIRBENCH:-fairbench}\" run -m \"" + where +
           "\" -d \"${1:?usage: $0 <dataset.csv> [outdir]}\" -o \"${2:-out}\"\n";
}

std::string generate_manifest(const FeatureModel& model, const Configuration& input, const GenerateOptions& options) {
    const Configuration c = with_defaults(model, extfm::close_selection(model, input));
    resolve(model, c);

    YAML::Emitter out;
    out << YAML::Comment("fairbench experiment manifest; field names are feature-model ids");
    out << YAML::BeginMap;
    out << YAML::Key << "format_version" << YAML::Value << kFormatVersion;
    out << YAML::Key << "provenance" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "tool_version" << YAML::Value << std::string(kToolVersion);
    out << YAML::Key << "created" << YAML::Value << (options.created.empty() ? utc_now() : options.created);
    out << YAML::Key << "feature_model_checksum" << YAML::Value << extfm::checksum(model);
    out << YAML::EndMap;
    out << YAML::Key << "seed" << YAML::Value << *c.attribute("experiment", "seed");

    out << YAML::Key << "selection" << YAML::Value << YAML::BeginMap;
    for (std::size_t s : model.sections()) {
        const auto& section = model.features()[s];
        if (!c.has(section.id)) continue;
        out << YAML::Key << section.id << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (std::size_t i = 0; i < model.size(); ++i) {
            if (c.has(model.features()[i].id) && below(model, i, s)) out << model.features()[i].id;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;

    out << YAML::Key << "attributes" << YAML::Value << YAML::BeginMap;
    for (const auto& f : model.features()) {
        if (!c.has(f.id) || f.id == model.features()[model.root()].id) continue;
        bool any = false;
        for (const auto& a : model.attributes()) {
            if (a.owner != f.id) continue;
            const auto v = c.attribute(a.owner, a.name);
            if (!v) continue;
            if (!any) out << YAML::Key << f.id << YAML::Value << YAML::BeginMap;
            any = true;
            out << YAML::Key << a.name << YAML::Value << YAML::DoubleQuoted << *v;
        }
        if (any) out << YAML::EndMap;
    }
    out << YAML::EndMap;
    out << YAML::EndMap;
    if (!out.good()) throw Error("manifest emitter failed: " + out.GetLastError());
    return std::string(out.c_str()) + "\n";
}

ParsedManifest parse_manifest(std::string_view text, const FeatureModel& model) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ParseError("manifest syntax error at line " + std::to_string(e.mark.line + 1) + ", column " +
                         std::to_string(e.mark.column + 1) + ": " + e.msg);
    }
    if (!doc.IsMap()) throw ParseError("manifest: expected a mapping at the top level" + where(doc));

    ParsedManifest pm;
    try {
        const auto version_node = require(doc, "format_version");
        const auto version = text::parse_number(scalar(version_node, "format_version"));
        if (!version || *version != kFormatVersion) {
            schema_error("unsupported format_version '" + version_node.Scalar() + "' (expected " +
                             std::to_string(kFormatVersion) + ")",
                         version_node);
        }
        const auto prov = require(doc, "provenance");
        if (!prov.IsMap()) schema_error("'provenance' must be a mapping", prov);
        pm.provenance.tool_version = scalar(require(prov, "tool_version"), "provenance.tool_version");
        pm.provenance.created = scalar(require(prov, "created"), "provenance.created");
        pm.provenance.feature_model_checksum =
            scalar(require(prov, "feature_model_checksum"), "provenance.feature_model_checksum");
        if (pm.provenance.feature_model_checksum != extfm::checksum(model)) {
            pm.warnings.push_back("manifest was generated against a different feature model (" +
                                  pm.provenance.feature_model_checksum + ")");
        }

        Configuration c;
        const std::string root_id = model.features()[model.root()].id;
        c.selected.insert(root_id);
        c.attributes[{root_id, "seed"}] = scalar(require(doc, "seed"), "seed");

        const auto selection = require(doc, "selection");
        if (!selection.IsMap()) schema_error("'selection' must map section ids to feature lists", selection);
        for (const auto& entry : selection) {
            const std::string section = scalar(entry.first, "section id");
            if (!model.contains(section) || model.parent_of(model.index_of(section)) != model.root()) {
                schema_error("unknown section '" + section + "'", entry.first);
            }
            c.selected.insert(section);
            const YAML::Node& list = entry.second;
            if (list.IsNull()) continue;
            if (!list.IsSequence()) schema_error("selection." + section + " must be a list of feature ids", list);
            for (const auto& item : list) {
                const std::string id = scalar(item, "feature id");
                if (!model.contains(id)) schema_error("unknown feature '" + id + "'", item);
                if (!below(model, model.index_of(id), model.index_of(section))) {
                    schema_error("feature '" + id + "' does not belong to section '" + section + "'", item);
                }
                c.selected.insert(id);
            }
        }

        if (const auto attrs = doc["attributes"]; attrs && !attrs.IsNull()) {
            if (!attrs.IsMap()) schema_error("'attributes' must be a mapping", attrs);
            for (const auto& entry : attrs) {
                const std::string owner = scalar(entry.first, "feature id");
                if (!model.contains(owner)) schema_error("unknown feature '" + owner + "'", entry.first);
                if (!entry.second.IsMap()) schema_error("attributes of '" + owner + "' must be a mapping", entry.second);
                for (const auto& kv : entry.second) {
                    const std::string name = scalar(kv.first, "attribute name");
                    if (!model.find_attribute(owner, name)) {
                        schema_error("unknown attribute '" + owner + "." + name + "'", kv.first);
                    }
                    c.attributes[{owner, name}] = scalar(kv.second, owner + "." + name);
                }
            }
        }
        for (const auto& entry : doc) {
            const std::string key = entry.first.Scalar();
            if (key != "format_version" && key != "provenance" && key != "seed" && key != "selection" &&
                key != "attributes") {
                schema_error("unexpected field '" + key + "'", entry.first);
            }
        }

        pm.config = with_defaults(model, extfm::close_selection(model, c));
    } catch (const YAML::Exception& e) {
        throw ParseError("manifest: " + e.msg + " at line " + std::to_string(e.mark.line + 1));
    }
    pm.spec = resolve(model, pm.config);
    return pm;
}

}  // namespace fairbench::manifest
