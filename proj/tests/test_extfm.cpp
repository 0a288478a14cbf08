#include <doctest.h>

#include <algorithm>
#include <set>

#include "fairbench/error.hpp"
#include "fairbench/extfm.hpp"
#include "fairbench/rng.hpp"
#include "random_model.hpp"

using namespace fairbench;
using namespace fairbench::extfm;
using support::random_model;

namespace {

const char* const kRegressionMessage = "Regression task is not compatible with fairness methods";
const char* const kMlpMessage = "Not compatible with MLP Classifier or MLP Regressor";

const FeatureModel& builtin() {
    static const FeatureModel m = load_feature_model();
    return m;
}

Configuration select(std::initializer_list<const char*> ids) {
    Configuration c;
    for (const char* id : ids) c.selected.insert(id);
    return c;
}

Configuration valid_classification() {
    Configuration c = close_selection(builtin(), select({"classification", "logistic_regression", "no_method",
                                                          "accuracy", "statistical_parity", "mean", "holdout"}));
    c.attributes[{"dataset", "label_name"}] = "label";
    c.attributes[{"classification", "positive_value"}] = "good";
    c.attributes[{"classification", "sensitive_features"}] = "sex=M";
    return c;
}

std::vector<std::string> reasons(const std::vector<Violation>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(x.reason);
    return out;
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

// Validity written directly from the tree/group/constraint semantics.
bool brute_valid(const FeatureModel& m, const std::vector<char>& sel) {
    const auto& fs = m.features();
    if (!sel[m.root()]) return false;
    std::vector<char> grouped(m.size(), 0);
    for (const auto& g : m.groups()) {
        for (const auto& id : g.members) grouped[m.index_of(id)] = 1;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (!fs[i].parent) continue;
        const bool parent_on = sel[m.index_of(*fs[i].parent)];
        if (sel[i] && !parent_on) return false;
        if (parent_on && !grouped[i] && fs[i].variability == Variability::mandatory && !sel[i]) return false;
    }
    for (const auto& g : m.groups()) {
        if (!sel[m.index_of(g.parent)]) continue;
        std::size_t count = 0;
        for (const auto& id : g.members) count += sel[m.index_of(id)];
        if (count == 0 || (g.kind == GroupKind::alternative && count > 1)) return false;
    }
    for (const auto& c : m.constraints()) {
        const bool a = sel[m.index_of(c.a)], b = sel[m.index_of(c.b)];
        if (c.kind == ConstraintKind::requires_feature ? (a && !b) : (a && b)) return false;
    }
    return true;
}

std::vector<std::vector<char>> brute_enumerate(const FeatureModel& m) {
    std::vector<std::vector<char>> out;
    const std::size_t n = m.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<char> sel(n);
        for (std::size_t i = 0; i < n; ++i) sel[i] = (mask >> i) & 1;
        if (brute_valid(m, sel)) out.push_back(sel);
    }
    return out;
}

std::set<std::string> to_ids(const FeatureModel& m, const std::vector<char>& sel) {
    std::set<std::string> ids;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel[i]) ids.insert(m.features()[i].id);
    }
    return ids;
}

std::set<std::string> allowed_reasons(const FeatureModel& m) {
    std::set<std::string> out{"No valid configuration contains this feature"};
    for (const auto& c : m.constraints()) out.insert(c.message);
    for (const auto& g : m.groups()) {
        std::string names;
        for (const auto& id : g.members) names += (names.empty() ? "" : ", ") + m.feature(id).name;
        out.insert("Only one of " + names + " can be selected");
    }
    return out;
}

}  // namespace

TEST_CASE("built-in model has seven sections and both exclusion messages") {
    const auto& m = builtin();
    CHECK(m.sections().size() == 7);
    std::set<std::string> messages;
    for (const auto& c : m.constraints()) messages.insert(c.message);
    CHECK(messages.count(kRegressionMessage) == 1);
    CHECK(messages.count(kMlpMessage) == 1);
    CHECK(load_feature_model(to_document(m)).size() == m.size());
    CHECK(checksum(load_feature_model(to_document(m))) == checksum(m));
}

TEST_CASE("model documents") {
    SUBCASE("single root") {
        const auto m = load_feature_model(
            R"({"format": "fairbench-feature-model", "format_version": 1,
                "features": [{"id": "r", "name": "Root", "variability": "mandatory"}]})");
        CHECK(m.size() == 1);
    }
    SUBCASE("constraint naming a ghost feature") {
        try {
            load_feature_model(
                R"({"format": "fairbench-feature-model", "format_version": 1,
                    "features": [{"id": "r", "name": "Root", "variability": "mandatory"},
                                 {"id": "a", "name": "A", "parent": "r"}],
                    "constraints": [{"kind": "requires", "a": "a", "b": "ghost", "message": "m"}]})");
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("ghost") != std::string::npos);
        }
    }
    SUBCASE("duplicate id and dangling parent") {
        CHECK_THROWS_AS(FeatureModel::build({{"r", "R", std::nullopt, Variability::mandatory, ""},
                                             {"r", "R2", std::string("r"), Variability::optional, ""}},
                                            {}, {}, {}),
                        ParseError);
        CHECK_THROWS_AS(FeatureModel::build({{"r", "R", std::nullopt, Variability::mandatory, ""},
                                             {"a", "A", std::string("nowhere"), Variability::optional, ""}},
                                            {}, {}, {}),
                        UnknownReferenceError);
    }
    SUBCASE("malformed text") { CHECK_THROWS_AS(load_feature_model("{not json"), ParseError); }
}

TEST_CASE("validate_configuration on the built-in model") {
    const auto& m = builtin();
    CHECK(validate_configuration(m, valid_classification()).empty());

    SUBCASE("regression with reweighing") {
        auto c = close_selection(m, select({"regression", "linear_regression", "reweighing", "mean_absolute_error",
                                            "mean", "holdout"}));
        c.attributes[{"dataset", "label_name"}] = "y";
        CHECK(contains(reasons(validate_configuration(m, c)), kRegressionMessage));
    }
    SUBCASE("both tasks") {
        auto c = valid_classification();
        c.selected.insert("regression");
        c.selected.insert("linear_regression");
        CHECK(contains(reasons(validate_configuration(m, c)), "Only one of Classification, Regression can be selected"));
    }
    SUBCASE("missing required attribute") {
        auto c = valid_classification();
        c.attributes.erase({"dataset", "label_name"});
        const auto r = reasons(validate_configuration(m, c));
        REQUIRE(r.size() == 1);
        CHECK(r[0].find("Label Name") != std::string::npos);
        CHECK(validate_configuration(m, c, {.check_attributes = false}).empty());
    }
    SUBCASE("mlp with reweighing") {
        auto c = valid_classification();
        c.selected.insert("mlp_classifier");
        c.selected.insert("reweighing");
        c.selected.insert("pre_processing");
        CHECK(contains(reasons(validate_configuration(m, c)), kMlpMessage));
    }
    SUBCASE("unknown id is a reference error, not a violation") {
        auto c = valid_classification();
        c.selected.insert("svm");
        CHECK_THROWS_AS(validate_configuration(m, c), UnknownReferenceError);
    }
}

TEST_CASE("propagate on the built-in model") {
    const auto& m = builtin();
    SUBCASE("MLP disables reweighing with its constraint message") {
        const auto s = propagate(m, select({"classification", "mlp_classifier"}));
        CHECK(s.at("reweighing").status == FeatureStatus::disabled);
        CHECK(s.at("reweighing").reason == kMlpMessage);
        CHECK(s.at("dir").status == FeatureStatus::free);
        CHECK(s.at("mlp_classifier").status == FeatureStatus::selected);
    }
    SUBCASE("any fairness method disables regression learners") {
        for (const char* method : {"reweighing", "dir", "demv"}) {
            const auto s = propagate(m, select({method}));
            for (const char* learner : {"regression", "linear_regression", "decision_tree_regressor"}) {
                CAPTURE(method);
                CAPTURE(learner);
                CHECK(s.at(learner).status == FeatureStatus::disabled);
                CHECK(s.at(learner).reason == kRegressionMessage);
            }
        }
    }
    SUBCASE("empty selection disables nothing") {
        const auto s = propagate(m, {});
        for (const auto& [id, fs] : s.features) {
            CAPTURE(id);
            CHECK(fs.status != FeatureStatus::disabled);
            CHECK(fs.status != FeatureStatus::selected);
        }
        CHECK(s.at("experiment").status == FeatureStatus::implied_selected);
        CHECK(s.at("metrics").status == FeatureStatus::implied_selected);
        CHECK(s.at("scaler").status == FeatureStatus::free);
    }
    SUBCASE("empty selection agrees with enumeration") {
        std::vector<char> reachable(m.size(), 0);
        for_each_valid(
            m, [&](const std::vector<char>& sel) {
                for (std::size_t i = 0; i < sel.size(); ++i) reachable[i] |= sel[i];
            },
            {.max_features = 64});
        for (std::size_t i = 0; i < m.size(); ++i) CHECK(reachable[i] == 1);
    }
}

TEST_CASE("enumerate_valid small models") {
    const Feature root{"r", "R", std::nullopt, Variability::mandatory, ""};
    const Feature a{"a", "A", std::string("r"), Variability::optional, ""};
    const Feature b{"b", "B", std::string("r"), Variability::optional, ""};
    const Feature c{"c", "C", std::string("r"), Variability::optional, ""};
    CHECK(enumerate_valid(FeatureModel::build({root, a, b}, {}, {}, {})).count == 4);
    CHECK(enumerate_valid(FeatureModel::build({root, a, b, c}, {{"r", GroupKind::alternative, {"a", "b", "c"}}}, {}, {}))
              .count == 3);
    CHECK(enumerate_valid(
              FeatureModel::build({root, a, b}, {}, {}, {{ConstraintKind::excludes_feature, "a", "b", "no"}}))
              .count == 3);
    CHECK_THROWS_AS(enumerate_valid(builtin()), InvalidArgument);
}

TEST_CASE("random models: enumeration, validation and propagation agree with brute force") {
    Rng rng(20240501);
    std::size_t checked = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const std::size_t n = 2 + rng.index(11);
        const FeatureModel m = random_model(rng, n);
        const auto valid = brute_enumerate(m);

        std::set<std::set<std::string>> expected, got;
        for (const auto& sel : valid) expected.insert(to_ids(m, sel));
        for (const auto& ids : enumerate_valid(m).configurations) got.insert(ids);
        CHECK(expected == got);

        // validate == membership in the enumeration, on every subset that contains the root
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<char> sel(n);
            for (std::size_t i = 0; i < n; ++i) sel[i] = (mask >> i) & 1;
            Configuration c;
            c.selected = to_ids(m, sel);
            CHECK(validate_configuration(m, c).empty() == brute_valid(m, sel));
        }

        const auto allowed = allowed_reasons(m);
        for (int p = 0; p < 6; ++p) {
            Configuration partial;
            for (std::size_t i = 1; i < n; ++i) {
                if (rng.unit() < 0.2) partial.selected.insert(m.features()[i].id);
            }
            const auto state = propagate(m, partial);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& id = m.features()[i].id;
                const auto& fs = state.at(id);
                if (partial.has(id)) {
                    CHECK(fs.status == FeatureStatus::selected);
                    continue;
                }
                bool extendable = false;
                for (const auto& sel : valid) {
                    bool ok = sel[i];
                    for (const auto& s : partial.selected) ok = ok && sel[m.index_of(s)];
                    if (ok) {
                        extendable = true;
                        break;
                    }
                }
                CHECK((fs.status == FeatureStatus::disabled) == !extendable);
                if (fs.status == FeatureStatus::disabled) CHECK(allowed.count(fs.reason) == 1);
                ++checked;
            }

            // Monotonicity: adding a selection never frees a disabled feature.
            Configuration bigger = partial;
            bigger.selected.insert(m.features()[1 + rng.index(n - 1)].id);
            const auto state2 = propagate(m, bigger);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& id = m.features()[i].id;
                if (state.at(id).status == FeatureStatus::disabled && !bigger.has(id)) {
                    CHECK(state2.at(id).status == FeatureStatus::disabled);
                }
            }
        }
    }
    CHECK(checked > 1000);
}

TEST_CASE("propagation matches enumeration on random models up to thirty features") {
    Rng rng(77);
    int compared = 0;
    for (int trial = 0; trial < 60 && compared < 25; ++trial) {
        const std::size_t n = 16 + rng.index(15);
        const FeatureModel m = random_model(rng, n);
        std::vector<std::vector<char>> valid;
        struct TooMany {};
        try {
            for_each_valid(m, [&](const std::vector<char>& sel) {
                if (valid.size() > 50000) throw TooMany{};
                valid.push_back(sel);
            });
        } catch (const TooMany&) {
            continue;
        }
        ++compared;
        Configuration partial;
        for (std::size_t i = 1; i < n; ++i) {
            if (rng.unit() < 0.1) partial.selected.insert(m.features()[i].id);
        }
        const auto state = propagate(m, partial);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& id = m.features()[i].id;
            if (partial.has(id)) continue;
            bool extendable = false;
            for (const auto& sel : valid) {
                bool ok = sel[i];
                for (const auto& s : partial.selected) ok = ok && sel[m.index_of(s)];
                if (ok) {
                    extendable = true;
                    break;
                }
            }
            CHECK((state.at(id).status == FeatureStatus::disabled) == !extendable);
        }
    }
    CHECK(compared >= 10);
}

TEST_CASE("close_selection adds ancestors and mandatory children") {
    const auto c = close_selection(builtin(), select({"reweighing"}));
    CHECK(c.has("pre_processing"));
    CHECK(c.has("fairness_methods"));
    CHECK(c.has("experiment"));
    CHECK(c.has("dataset"));
    CHECK_FALSE(c.has("scaler"));
}
