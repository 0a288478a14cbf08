#pragma once

// Extended feature model of the fairness-benchmarking workflow: a feature
// tree with groups, typed attributes and requires/excludes constraints, plus
// configuration validation and interactive constraint propagation.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fairbench::extfm {

enum class Variability { mandatory, optional };

struct Feature {
    std::string id;
    std::string name;
    std::optional<std::string> parent;
    Variability variability = Variability::optional;
    std::string description;
};

enum class GroupKind {
    alternative,  ///< exactly one member when the parent is selected
    any_of,       ///< at least one member when the parent is selected ("or" group)
};

struct Group {
    std::string parent;
    GroupKind kind = GroupKind::alternative;
    std::vector<std::string> members;
};

enum class AttributeKind { text, number, enumeration, number_list };

struct AttributeDecl {
    std::string owner;
    std::string name;
    std::string display_name;
    AttributeKind kind = AttributeKind::text;
    bool required = false;
    std::vector<std::string> choices;            // enumeration only
    std::optional<double> min;                   // number / number_list elements
    std::optional<double> max;
    bool integer = false;
    bool exclusive_min = false;
    std::optional<std::string> default_value;
    /// number_list: length must equal the count of selected leaves below this feature.
    std::optional<std::string> list_length_of;
    std::string description;
};

enum class ConstraintKind { requires_feature, excludes_feature };

struct CrossConstraint {
    ConstraintKind kind = ConstraintKind::requires_feature;
    std::string a;
    std::string b;
    std::string message;
};

/// Immutable, invariant-checked feature model. Features keep declaration order.
class FeatureModel {
public:
    /// Checks every structural invariant; throws ParseError / UnknownReferenceError.
    static FeatureModel build(std::vector<Feature> features, std::vector<Group> groups,
                              std::vector<AttributeDecl> attributes,
                              std::vector<CrossConstraint> constraints);

    const std::vector<Feature>& features() const noexcept { return features_; }
    const std::vector<Group>& groups() const noexcept { return groups_; }
    const std::vector<AttributeDecl>& attributes() const noexcept { return attributes_; }
    const std::vector<CrossConstraint>& constraints() const noexcept { return constraints_; }

    std::size_t size() const noexcept { return features_.size(); }
    std::size_t root() const noexcept { return root_; }
    bool contains(std::string_view id) const;
    /// Throws UnknownReferenceError for unknown ids.
    std::size_t index_of(std::string_view id) const;
    const Feature& feature(std::string_view id) const { return features_[index_of(id)]; }

    /// Parent index, or npos for the root.
    std::size_t parent_of(std::size_t i) const { return parent_[i]; }
    const std::vector<std::size_t>& children_of(std::size_t i) const { return children_[i]; }
    /// Index into groups(), or npos when the feature is not a group member.
    std::size_t group_of(std::size_t i) const { return group_of_[i]; }
    bool is_leaf(std::size_t i) const { return children_[i].empty(); }
    /// Child that must be selected with its parent (mandatory and not in a group).
    bool is_mandatory_child(std::size_t i) const;

    const AttributeDecl* find_attribute(std::string_view owner, std::string_view name) const;

    /// Top-level sections (children of the root) in declaration order.
    std::vector<std::size_t> sections() const { return children_[root_]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    FeatureModel() = default;

    std::vector<Feature> features_;
    std::vector<Group> groups_;
    std::vector<AttributeDecl> attributes_;
    std::vector<CrossConstraint> constraints_;

    std::size_t root_ = 0;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> group_of_;
};

/// A user's (possibly partial) selection plus attribute values keyed by
/// (feature id, attribute name).
struct Configuration {
    std::set<std::string> selected;
    std::map<std::pair<std::string, std::string>, std::string> attributes;

    bool has(std::string_view id) const { return selected.count(std::string(id)) != 0; }
    std::optional<std::string> attribute(std::string_view owner, std::string_view name) const;
};

struct Violation {
    std::string reason;
};

struct ValidationOptions {
    bool check_attributes = true;
};

enum class FeatureStatus { selected, implied_selected, disabled, free };

struct FeatureState {
    FeatureStatus status = FeatureStatus::free;
    std::string reason;  // non-empty only when disabled
};

/// Per-feature state in model declaration order.
struct PropagationState {
    std::vector<std::pair<std::string, FeatureState>> features;

    const FeatureState& at(std::string_view id) const;
};

std::string_view to_string(FeatureStatus s) noexcept;
std::string_view to_string(GroupKind k) noexcept;
std::string_view to_string(AttributeKind k) noexcept;
std::string_view to_string(ConstraintKind k) noexcept;

/// The built-in fairness-benchmarking workflow model (seven sections).
FeatureModel load_feature_model();

/// Parses a model document (JSON; see docs/feature-model.md).
FeatureModel load_feature_model(std::string_view document);

/// Canonical document text; load_feature_model(to_document(m)) reproduces m.
std::string to_document(const FeatureModel& model);

/// The raw text of the built-in model document.
std::string_view builtin_model_document();

/// FNV-1a 64 digest of the canonical document, formatted "fnv1a64:<hex>".
std::string checksum(const FeatureModel& model);

/// Empty result means the configuration is valid. Unknown feature ids or
/// attributes raise UnknownReferenceError instead.
std::vector<Violation> validate_configuration(const FeatureModel& model, const Configuration& config,
                                              ValidationOptions options = {});

/// For every feature: Selected if chosen in `partial`, Disabled if no valid
/// configuration extends partial + feature, ImpliedSelected if it is forced by
/// the tree (root, ancestors and mandatory descendants of selected features),
/// Free otherwise.
PropagationState propagate(const FeatureModel& model, const Configuration& partial);

/// Adds ancestors and mandatory descendants of every selected feature (and the root).
Configuration close_selection(const FeatureModel& model, const Configuration& config);

struct EnumerateOptions {
    std::size_t max_features = 30;
};

struct Enumeration {
    std::size_t count = 0;
    std::vector<std::set<std::string>> configurations;
};

/// Exhaustive list of valid selections (attributes ignored). Throws
/// InvalidArgument when the model has more than options.max_features features.
Enumeration enumerate_valid(const FeatureModel& model, EnumerateOptions options = {});

/// Streaming form of enumerate_valid: `visit` receives a per-feature selection
/// mask (declaration order) for every valid configuration.
void for_each_valid(const FeatureModel& model, const std::function<void(const std::vector<char>&)>& visit,
                    EnumerateOptions options = {});

}  // namespace fairbench::extfm
