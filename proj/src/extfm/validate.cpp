#include <cmath>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/extfm.hpp"
#include "fairbench/text.hpp"
#include "internal.hpp"

namespace fairbench::extfm {

namespace detail {

std::vector<char> to_mask(const FeatureModel& model, const std::set<std::string>& ids) {
    std::vector<char> mask(model.size(), 0);
    for (const auto& id : ids) mask[model.index_of(id)] = 1;
    return mask;
}

namespace {
std::string member_names(const FeatureModel& model, const Group& group) {
    std::vector<std::string> names;
    for (const auto& m : group.members) names.push_back(model.feature(m).name);
    return text::join(names, ", ");
}
}  // namespace

std::string group_conflict_message(const FeatureModel& model, const Group& group) {
    return "Only one of " + member_names(model, group) + " can be selected";
}

std::string group_empty_message(const FeatureModel& model, const Group& group) {
    if (group.kind == GroupKind::alternative) {
        return "Select exactly one of " + member_names(model, group);
    }
    return "Select at least one of " + member_names(model, group);
}

std::size_t selected_leaves_below(const FeatureModel& model, const std::vector<char>& mask, std::size_t feature) {
    std::size_t count = 0;
    std::vector<std::size_t> stack(model.children_of(feature));
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        if (!mask[i]) continue;
        if (model.is_leaf(i)) ++count;
        for (std::size_t c : model.children_of(i)) stack.push_back(c);
    }
    return count;
}

}  // namespace detail

namespace {

std::string describe(const AttributeDecl& decl, const FeatureModel& model) {
    return decl.display_name + " of " + model.feature(decl.owner).name;
}

std::optional<std::string> check_bounds(const AttributeDecl& decl, double v) {
    if (decl.integer && std::floor(v) != v) return "must be an integer";
    if (decl.min) {
        if (decl.exclusive_min && !(v > *decl.min)) return "must be greater than " + text::shortest(*decl.min);
        if (!decl.exclusive_min && v < *decl.min) return "must be at least " + text::shortest(*decl.min);
    }
    if (decl.max && v > *decl.max) return "must be at most " + text::shortest(*decl.max);
    return std::nullopt;
}

void check_attribute(const FeatureModel& model, const AttributeDecl& decl, const std::vector<char>& mask,
                     const std::optional<std::string>& raw, std::vector<Violation>& out) {
    const std::string value = raw ? std::string(text::trim(*raw)) : std::string();
    if (value.empty()) {
        if (decl.required) out.push_back({describe(decl, model) + " is required"});
        return;
    }
    switch (decl.kind) {
        case AttributeKind::text:
            return;
        case AttributeKind::number: {
            const auto v = text::parse_number(value);
            if (!v) {
                out.push_back({describe(decl, model) + " must be a number"});
            } else if (auto why = check_bounds(decl, *v)) {
                out.push_back({describe(decl, model) + " " + *why});
            }
            return;
        }
        case AttributeKind::enumeration: {
            for (const auto& c : decl.choices) {
                if (c == value) return;
            }
            out.push_back({describe(decl, model) + " must be one of: " + text::join(decl.choices, ", ")});
            return;
        }
        case AttributeKind::number_list: {
            std::size_t count = 0;
            double total = 0.0;
            for (const auto& part : text::split(value, ',')) {
                const auto v = text::parse_number(part);
                if (!v) {
                    out.push_back({describe(decl, model) + " must be a comma-separated list of numbers"});
                    return;
                }
                if (auto why = check_bounds(decl, *v)) {
                    out.push_back({describe(decl, model) + " values " + *why});
                    return;
                }
                total += *v;
                ++count;
            }
            if (decl.list_length_of) {
                const std::size_t expected =
                    detail::selected_leaves_below(model, mask, model.index_of(*decl.list_length_of));
                if (count != expected) {
                    out.push_back({describe(decl, model) + " needs one value per selected " +
                                   model.feature(*decl.list_length_of).name + " leaf (expected " +
                                   std::to_string(expected) + ", got " + std::to_string(count) + ")"});
                    return;
                }
            }
            if (decl.min && *decl.min >= 0.0 && !(total > 0.0)) {
                out.push_back({describe(decl, model) + " must not all be zero"});
            }
            return;
        }
    }
}

}  // namespace

std::vector<Violation> validate_configuration(const FeatureModel& model, const Configuration& config,
                                              ValidationOptions options) {
    const std::vector<char> sel = detail::to_mask(model, config.selected);
    for (const auto& [key, value] : config.attributes) {
        model.index_of(key.first);
        if (!model.find_attribute(key.first, key.second)) {
            throw UnknownReferenceError("attribute", key.first + "." + key.second);
        }
    }

    std::vector<Violation> out;
    const auto& features = model.features();

    if (!sel[model.root()]) out.push_back({features[model.root()].name + " must be selected"});

    for (std::size_t i = 0; i < model.size(); ++i) {
        const std::size_t p = model.parent_of(i);
        if (sel[i] && p != FeatureModel::npos && !sel[p]) {
            out.push_back({features[i].name + " requires " + features[p].name + " to be selected"});
        }
    }
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!sel[i]) continue;
        for (std::size_t c : model.children_of(i)) {
            if (model.is_mandatory_child(c) && !sel[c]) {
                out.push_back({features[c].name + " is mandatory when " + features[i].name + " is selected"});
            }
        }
    }
    for (const auto& g : model.groups()) {
        if (!sel[model.index_of(g.parent)]) continue;
        std::size_t count = 0;
        for (const auto& m : g.members) count += sel[model.index_of(m)] ? 1 : 0;
        if (count == 0) {
            out.push_back({detail::group_empty_message(model, g)});
        } else if (g.kind == GroupKind::alternative && count > 1) {
            out.push_back({detail::group_conflict_message(model, g)});
        }
    }
    for (const auto& c : model.constraints()) {
        const bool a = sel[model.index_of(c.a)];
        const bool b = sel[model.index_of(c.b)];
        const bool violated = c.kind == ConstraintKind::requires_feature ? (a && !b) : (a && b);
        if (violated) out.push_back({c.message});
    }
    if (options.check_attributes) {
        for (const auto& decl : model.attributes()) {
            if (!sel[model.index_of(decl.owner)]) continue;
            auto raw = config.attribute(decl.owner, decl.name);
            if (!raw && decl.default_value) raw = decl.default_value;
            check_attribute(model, decl, sel, raw, out);
        }
    }
    return out;
}

Configuration close_selection(const FeatureModel& model, const Configuration& config) {
    std::vector<char> sel = detail::to_mask(model, config.selected);
    sel[model.root()] = 1;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!sel[i]) continue;
        for (std::size_t p = model.parent_of(i); p != FeatureModel::npos; p = model.parent_of(p)) sel[p] = 1;
    }
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (sel[i]) stack.push_back(i);
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t c : model.children_of(i)) {
            if (model.is_mandatory_child(c) && !sel[c]) {
                sel[c] = 1;
                stack.push_back(c);
            }
        }
    }
    Configuration out;
    out.attributes = config.attributes;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (sel[i]) out.selected.insert(model.features()[i].id);
    }
    return out;
}

}  // namespace fairbench::extfm
