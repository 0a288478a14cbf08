#include <algorithm>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/extfm.hpp"

namespace fairbench::extfm {

FeatureModel FeatureModel::build(std::vector<Feature> features, std::vector<Group> groups,
                                 std::vector<AttributeDecl> attributes,
                                 std::vector<CrossConstraint> constraints) {
    FeatureModel m;
    m.features_ = std::move(features);
    m.groups_ = std::move(groups);
    m.attributes_ = std::move(attributes);
    m.constraints_ = std::move(constraints);

    const std::size_t n = m.features_.size();
    if (n == 0) throw ParseError("feature model has no features");

    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = m.features_[i];
        if (f.id.empty()) throw ParseError("feature #" + std::to_string(i) + " has an empty id");
        if (!m.index_.emplace(f.id, i).second) throw ParseError("duplicate feature id '" + f.id + "'");
    }

    m.parent_.assign(n, npos);
    m.children_.assign(n, {});
    m.group_of_.assign(n, npos);

    std::size_t roots = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = m.features_[i];
        if (!f.parent) {
            ++roots;
            m.root_ = i;
            continue;
        }
        auto it = m.index_.find(*f.parent);
        if (it == m.index_.end()) {
            throw UnknownReferenceError("parent feature", *f.parent);
        }
        m.parent_[i] = it->second;
        m.children_[it->second].push_back(i);
    }
    if (roots != 1) {
        throw ParseError("feature model must have exactly one root, found " + std::to_string(roots));
    }
    if (m.features_[m.root_].variability != Variability::mandatory) {
        throw ParseError("root feature '" + m.features_[m.root_].id + "' must be mandatory");
    }
    // Every node must reach the root without revisiting.
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t cur = i;
        std::size_t steps = 0;
        while (cur != m.root_) {
            cur = m.parent_[cur];
            if (cur == npos || ++steps > n) {
                throw ParseError("parent links of feature '" + m.features_[i].id + "' form a cycle");
            }
        }
    }

    for (std::size_t g = 0; g < m.groups_.size(); ++g) {
        const auto& group = m.groups_[g];
        const std::size_t p = m.index_of(group.parent);
        if (group.members.size() < 2) {
            throw ParseError("group under '" + group.parent + "' needs at least two members");
        }
        for (const auto& member : group.members) {
            const std::size_t c = m.index_of(member);
            if (m.parent_[c] != p) {
                throw ParseError("group member '" + member + "' is not a child of '" + group.parent + "'");
            }
            if (m.group_of_[c] != npos) {
                throw ParseError("feature '" + member + "' belongs to more than one group");
            }
            m.group_of_[c] = g;
        }
    }

    for (const auto& c : m.constraints_) {
        m.index_of(c.a);
        m.index_of(c.b);
        if (c.message.empty()) {
            throw ParseError("constraint between '" + c.a + "' and '" + c.b + "' has no message");
        }
    }

    for (std::size_t i = 0; i < m.attributes_.size(); ++i) {
        const auto& a = m.attributes_[i];
        m.index_of(a.owner);
        if (a.name.empty()) throw ParseError("attribute of '" + a.owner + "' has an empty name");
        for (std::size_t j = 0; j < i; ++j) {
            if (m.attributes_[j].owner == a.owner && m.attributes_[j].name == a.name) {
                throw ParseError("duplicate attribute '" + a.name + "' on feature '" + a.owner + "'");
            }
        }
        if (a.kind == AttributeKind::enumeration && a.choices.empty()) {
            throw ParseError("enumeration attribute '" + a.name + "' has no choices");
        }
        if (a.list_length_of) m.index_of(*a.list_length_of);
    }
    return m;
}

bool FeatureModel::contains(std::string_view id) const { return index_.count(std::string(id)) != 0; }

std::size_t FeatureModel::index_of(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw UnknownReferenceError("feature", std::string(id));
    return it->second;
}

bool FeatureModel::is_mandatory_child(std::size_t i) const {
    return parent_[i] != npos && group_of_[i] == npos &&
           features_[i].variability == Variability::mandatory;
}

const AttributeDecl* FeatureModel::find_attribute(std::string_view owner, std::string_view name) const {
    auto it = std::find_if(attributes_.begin(), attributes_.end(),
                           [&](const AttributeDecl& a) { return a.owner == owner && a.name == name; });
    return it == attributes_.end() ? nullptr : &*it;
}

std::optional<std::string> Configuration::attribute(std::string_view owner, std::string_view name) const {
    auto it = attributes.find({std::string(owner), std::string(name)});
    if (it == attributes.end()) return std::nullopt;
    return it->second;
}

const FeatureState& PropagationState::at(std::string_view id) const {
    for (const auto& [fid, state] : features) {
        if (fid == id) return state;
    }
    throw UnknownReferenceError("feature", std::string(id));
}

std::string_view to_string(FeatureStatus s) noexcept {
    switch (s) {
        case FeatureStatus::selected: return "selected";
        case FeatureStatus::implied_selected: return "implied";
        case FeatureStatus::disabled: return "disabled";
        case FeatureStatus::free: return "free";
    }
    return "free";
}

std::string_view to_string(GroupKind k) noexcept {
    return k == GroupKind::alternative ? "alternative" : "or";
}

std::string_view to_string(AttributeKind k) noexcept {
    switch (k) {
        case AttributeKind::text: return "text";
        case AttributeKind::number: return "number";
        case AttributeKind::enumeration: return "enumeration";
        case AttributeKind::number_list: return "number_list";
    }
    return "text";
}

std::string_view to_string(ConstraintKind k) noexcept {
    return k == ConstraintKind::requires_feature ? "requires" : "excludes";
}

}  // namespace fairbench::extfm
