#include <json.hpp>

#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/text.hpp"

namespace fairbench::manifest {

namespace {

using extfm::Configuration;
using extfm::FeatureModel;

std::string attr(const Configuration& c, std::string_view owner, std::string_view name) {
    auto v = c.attribute(owner, name);
    if (!v) throw ConstraintError({std::string(owner) + "." + std::string(name) + " has no value"});
    return std::string(text::trim(*v));
}

double number_attr(const Configuration& c, std::string_view owner, std::string_view name) {
    const auto s = attr(c, owner, name);
    if (auto v = text::parse_number(s)) return *v;
    throw ConstraintError({std::string(owner) + "." + std::string(name) + " must be a number"});
}

// Selected leaves below `section`, in model declaration order.
std::vector<std::string> selected_leaves(const FeatureModel& model, const Configuration& c, std::string_view section) {
    std::vector<std::string> out;
    const std::size_t root = model.index_of(section);
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!model.is_leaf(i) || !c.has(model.features()[i].id)) continue;
        for (std::size_t p = i; p != FeatureModel::npos; p = model.parent_of(p)) {
            if (p == root) {
                out.push_back(model.features()[i].id);
                break;
            }
        }
    }
    return out;
}

std::string to_text(const nlohmann::json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_number()) return text::shortest(v.get<double>());
    if (v.is_array()) {
        std::vector<std::string> parts;
        for (const auto& x : v) {
            if (!x.is_number() && !x.is_string()) throw ParseError(where + ": list values must be numbers");
            parts.push_back(to_text(x, where));
        }
        return text::join(parts, ",");
    }
    throw ParseError(where + ": attribute values must be strings, numbers or number lists");
}

}  // namespace

Configuration with_defaults(const FeatureModel& model, const Configuration& config) {
    Configuration out = config;
    for (const auto& a : model.attributes()) {
        if (!config.has(a.owner)) continue;
        const auto v = config.attribute(a.owner, a.name);
        if ((!v || text::trim(*v).empty()) && a.default_value) out.attributes[{a.owner, a.name}] = *a.default_value;
    }
    return out;
}

bench::ExperimentSpec resolve(const FeatureModel& model, const Configuration& input) {
    const Configuration c = with_defaults(model, input);
    const auto violations = extfm::validate_configuration(model, c);
    if (!violations.empty()) {
        std::vector<std::string> messages;
        for (const auto& v : violations) messages.push_back(v.reason);
        throw ConstraintError(std::move(messages));
    }

    bench::ExperimentSpec spec;
    const double seed = number_attr(c, "experiment", "seed");
    if (!(seed < 9007199254740992.0)) throw ConstraintError({"Random Seed of Fairness Benchmark must be below 2^53"});
    spec.seed = static_cast<std::uint64_t>(seed);
    spec.schema.label_column = attr(c, "dataset", "label_name");
    if (c.has("classification")) {
        spec.schema.task = data::Task::classification;
        spec.schema.positive_value = attr(c, "classification", "positive_value");
        try {
            spec.schema.sensitive = data::parse_sensitive_features(attr(c, "classification", "sensitive_features"));
        } catch (const ParseError& e) {
            throw ConstraintError({std::string("Sensitive Features of Classification: ") + e.what()});
        }
        if (spec.schema.sensitive.empty()) {
            throw ConstraintError({"Sensitive Features of Classification needs at least one column=value entry"});
        }
        for (const auto& s : spec.schema.sensitive) {
            if (s.column == spec.schema.label_column) {
                throw ConstraintError({"Sensitive Features of Classification cannot include the label column"});
            }
        }
    } else {
        spec.schema.task = data::Task::regression;
    }

    spec.scalers.clear();
    for (const auto& id : selected_leaves(model, c, "scaler")) {
        if (id == "no_scaler") spec.scalers.push_back(data::ScalerKind::none);
        if (id == "standard_scaler") spec.scalers.push_back(data::ScalerKind::standard);
        if (id == "min_max_scaler") spec.scalers.push_back(data::ScalerKind::min_max);
    }
    if (spec.scalers.empty()) spec.scalers.push_back(data::ScalerKind::none);

    for (const auto& id : selected_leaves(model, c, "ml_model")) {
        learners::LearnerSpec l;
        if (id == "logistic_regression") l.kind = learners::LearnerKind::logistic_regression;
        else if (id == "decision_tree_classifier") l.kind = learners::LearnerKind::decision_tree;
        else if (id == "mlp_classifier") l.kind = learners::LearnerKind::mlp;
        else if (id == "linear_regression") l.kind = learners::LearnerKind::linear_regression;
        else if (id == "decision_tree_regressor") l.kind = learners::LearnerKind::decision_tree_regressor;
        else throw ConstraintError({"feature '" + id + "' is not a known learner"});
        l.seed = spec.seed;
        spec.learners.push_back(l);
    }

    for (const auto& id : selected_leaves(model, c, "fairness_methods")) {
        mitigation::MitigationSpec m;
        if (id == "no_method") {
            m.kind = mitigation::MitigationKind::none;
        } else if (id == "reweighing") {
            m.kind = mitigation::MitigationKind::reweighing;
        } else if (id == "dir") {
            m.kind = mitigation::MitigationKind::dir;
            m.repair_level = number_attr(c, "dir", "repair_level");
        } else if (id == "demv") {
            m.kind = mitigation::MitigationKind::demv;
            m.tolerance = number_attr(c, "demv", "tolerance");
            m.max_iterations = static_cast<std::size_t>(number_attr(c, "demv", "max_iterations"));
        } else {
            throw ConstraintError({"feature '" + id + "' is not a known fairness method"});
        }
        spec.mitigations.push_back(m);
    }

    for (const auto& id : selected_leaves(model, c, "metrics")) {
        std::string kebab = id;
        for (char& ch : kebab) ch = ch == '_' ? '-' : ch;
        const auto k = metrics::parse_metric_kind(kebab);
        if (!k) throw ConstraintError({"feature '" + id + "' is not a known metric"});
        spec.metrics.push_back(*k);
    }

    const auto tradeoff = selected_leaves(model, c, "tradeoff");
    const std::string t = tradeoff.empty() ? "mean" : tradeoff.front();
    std::string kebab = t;
    for (char& ch : kebab) ch = ch == '_' ? '-' : ch;
    spec.tradeoff.kind = bench::parse_tradeoff_kind(kebab).value_or(bench::TradeoffKind::mean);
    if (spec.tradeoff.kind == bench::TradeoffKind::weighted_sum) {
        for (const auto& part : text::split(attr(c, "weighted_sum", "weights"), ',')) {
            spec.tradeoff.weights.push_back(*text::parse_number(part));
        }
    }

    if (c.has("holdout")) {
        spec.validation.kind = bench::ValidationSpec::Kind::holdout;
        spec.validation.test_fraction = number_attr(c, "holdout", "test_fraction");
        spec.validation.stratified = true;
    } else {
        spec.validation.kind = bench::ValidationSpec::Kind::k_fold;
        spec.validation.k = static_cast<std::size_t>(number_attr(c, "k_fold", "k"));
        spec.validation.stratified = attr(c, "k_fold", "stratified") == "true";
    }
    bench::check_spec(spec);
    return spec;
}

Configuration parse_configuration_document(std::string_view json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("configuration document: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("configuration document must be a JSON object");
    Configuration c;
    if (auto sel = doc.find("selected"); sel != doc.end()) {
        if (!sel->is_array()) throw ParseError("configuration document: 'selected' must be an array of feature ids");
        for (const auto& id : *sel) {
            if (!id.is_string()) throw ParseError("configuration document: feature ids must be strings");
            c.selected.insert(id.get<std::string>());
        }
    }
    if (auto attrs = doc.find("attributes"); attrs != doc.end()) {
        if (!attrs->is_object()) throw ParseError("configuration document: 'attributes' must be an object");
        for (const auto& [feature, values] : attrs->items()) {
            if (!values.is_object()) {
                throw ParseError("configuration document: attributes of '" + feature + "' must be an object");
            }
            for (const auto& [name, value] : values.items()) {
                c.attributes[{feature, name}] = to_text(value, "attribute " + feature + "." + name);
            }
        }
    }
    for (const auto& [key, _] : doc.items()) {
        if (key != "selected" && key != "attributes") {
            throw ParseError("configuration document: unexpected field '" + key + "'");
        }
    }
    return c;
}

std::string configuration_document(const Configuration& config) {
    nlohmann::ordered_json doc;
    doc["selected"] = nlohmann::ordered_json::array();
    for (const auto& id : config.selected) doc["selected"].push_back(id);
    doc["attributes"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : config.attributes) doc["attributes"][key.first][key.second] = value;
    return doc.dump(2) + "\n";
}

}  // namespace fairbench::manifest
