// Constraint propagation by satisfiability probing: a feature is disabled iff
// the CNF encoding of the model plus the partial selection plus that feature
// has no model. Feature models here are small (tens of features), so a plain
// DPLL with unit propagation answers each probe instantly.

#include <cstdint>
#include <string>
#include <vector>

#include "fairbench/extfm.hpp"
#include "internal.hpp"

namespace fairbench::extfm {

namespace {

// Literal encoding: 2*var for "selected", 2*var+1 for "not selected".
using Clause = std::vector<std::size_t>;

constexpr std::size_t pos(std::size_t v) { return 2 * v; }
constexpr std::size_t neg(std::size_t v) { return 2 * v + 1; }

struct Encoding {
    std::vector<Clause> structure;
    std::vector<Clause> constraints;  // one per cross constraint, declaration order
};

Encoding encode(const FeatureModel& model) {
    Encoding e;
    e.structure.push_back({pos(model.root())});
    for (std::size_t i = 0; i < model.size(); ++i) {
        const std::size_t p = model.parent_of(i);
        if (p == FeatureModel::npos) continue;
        e.structure.push_back({neg(i), pos(p)});
        if (model.is_mandatory_child(i)) e.structure.push_back({neg(p), pos(i)});
    }
    for (const auto& g : model.groups()) {
        const std::size_t p = model.index_of(g.parent);
        Clause some{neg(p)};
        for (const auto& m : g.members) some.push_back(pos(model.index_of(m)));
        e.structure.push_back(std::move(some));
        if (g.kind == GroupKind::alternative) {
            for (std::size_t a = 0; a < g.members.size(); ++a) {
                for (std::size_t b = a + 1; b < g.members.size(); ++b) {
                    e.structure.push_back({neg(model.index_of(g.members[a])), neg(model.index_of(g.members[b]))});
                }
            }
        }
    }
    for (const auto& c : model.constraints()) {
        const std::size_t a = model.index_of(c.a);
        const std::size_t b = model.index_of(c.b);
        if (c.kind == ConstraintKind::requires_feature) {
            e.constraints.push_back({neg(a), pos(b)});
        } else {
            e.constraints.push_back({neg(a), neg(b)});
        }
    }
    return e;
}

class Solver {
public:
    Solver(std::size_t vars, std::vector<const Clause*> clauses) : vars_(vars), clauses_(std::move(clauses)) {}

    bool satisfiable(const std::vector<char>& assumed_true) const {
        std::vector<std::int8_t> assign(vars_, -1);
        for (std::size_t v = 0; v < vars_; ++v) {
            if (assumed_true[v]) assign[v] = 1;
        }
        return search(assign);
    }

private:
    static bool lit_true(const std::vector<std::int8_t>& a, std::size_t lit) {
        const std::int8_t v = a[lit / 2];
        return v >= 0 && (v == 1) == (lit % 2 == 0);
    }

    bool unit_propagate(std::vector<std::int8_t>& a) const {
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Clause* c : clauses_) {
                std::size_t unassigned = 0;
                std::size_t last = 0;
                bool sat = false;
                for (std::size_t lit : *c) {
                    const std::int8_t v = a[lit / 2];
                    if (v < 0) {
                        ++unassigned;
                        last = lit;
                    } else if (lit_true(a, lit)) {
                        sat = true;
                        break;
                    }
                }
                if (sat) continue;
                if (unassigned == 0) return false;
                if (unassigned == 1) {
                    a[last / 2] = (last % 2 == 0) ? 1 : 0;
                    changed = true;
                }
            }
        }
        return true;
    }

    bool search(std::vector<std::int8_t>& a) const {
        if (!unit_propagate(a)) return false;
        std::size_t v = 0;
        while (v < vars_ && a[v] >= 0) ++v;
        if (v == vars_) return true;
        for (std::int8_t value : {std::int8_t{0}, std::int8_t{1}}) {
            std::vector<std::int8_t> next(a);
            next[v] = value;
            if (search(next)) return true;
        }
        return false;
    }

    std::size_t vars_;
    std::vector<const Clause*> clauses_;
};

std::vector<const Clause*> pointers(const std::vector<Clause>& clauses) {
    std::vector<const Clause*> out;
    for (const auto& c : clauses) out.push_back(&c);
    return out;
}

// Selected/deselected sets forced by the tree alone from `seed`.
struct TreeClosure {
    std::vector<char> on;
    std::vector<char> off;
};

TreeClosure tree_closure(const FeatureModel& model, std::vector<char> seed) {
    TreeClosure cl{std::move(seed), std::vector<char>(model.size(), 0)};
    auto& on = cl.on;
    on[model.root()] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < model.size(); ++i) {
            if (!on[i]) continue;
            const std::size_t p = model.parent_of(i);
            if (p != FeatureModel::npos && !on[p]) on[p] = 1, changed = true;
            for (std::size_t c : model.children_of(i)) {
                if (model.is_mandatory_child(c) && !on[c]) on[c] = 1, changed = true;
            }
        }
    }
    std::vector<std::size_t> stack;
    for (const auto& g : model.groups()) {
        if (g.kind != GroupKind::alternative) continue;
        bool any = false;
        for (const auto& m : g.members) any = any || on[model.index_of(m)];
        if (!any) continue;
        for (const auto& m : g.members) {
            const std::size_t i = model.index_of(m);
            if (!on[i]) stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        if (cl.off[i]) continue;
        cl.off[i] = 1;
        for (std::size_t c : model.children_of(i)) stack.push_back(c);
    }
    return cl;
}

class Propagator {
public:
    explicit Propagator(const FeatureModel& model)
        : model_(model), enc_(encode(model)), full_(model.size(), all_clauses()) {}

    bool satisfiable(const std::vector<char>& assumed) const { return full_.satisfiable(assumed); }

    std::string reason(const std::vector<char>& assumed) const {
        const auto& constraints = model_.constraints();
        const TreeClosure cl = tree_closure(model_, assumed);

        // A constraint contradicted outright by the forced tree closure.
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            const std::size_t a = model_.index_of(constraints[k].a);
            const std::size_t b = model_.index_of(constraints[k].b);
            const bool violated = constraints[k].kind == ConstraintKind::requires_feature
                                      ? (cl.on[a] && cl.off[b] && !cl.on[b])
                                      : (cl.on[a] && cl.on[b]);
            if (violated) return constraints[k].message;
        }
        // Two members of one alternative group forced together.
        for (const auto& g : model_.groups()) {
            if (g.kind != GroupKind::alternative) continue;
            std::size_t count = 0;
            for (const auto& m : g.members) count += cl.on[model_.index_of(m)] ? 1 : 0;
            if (count > 1) return detail::group_conflict_message(model_, g);
        }
        // A single constraint that rules the selection out together with the tree.
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            auto clauses = pointers(enc_.structure);
            clauses.push_back(&enc_.constraints[k]);
            if (!Solver(model_.size(), std::move(clauses)).satisfiable(assumed)) return constraints[k].message;
        }
        // Several constraints interact: blame the first whose removal restores satisfiability.
        for (std::size_t k = 0; k < constraints.size(); ++k) {
            auto clauses = pointers(enc_.structure);
            for (std::size_t j = 0; j < constraints.size(); ++j) {
                if (j != k) clauses.push_back(&enc_.constraints[j]);
            }
            if (Solver(model_.size(), std::move(clauses)).satisfiable(assumed)) return constraints[k].message;
        }
        for (const auto& c : constraints) {
            const std::size_t a = model_.index_of(c.a);
            const std::size_t b = model_.index_of(c.b);
            if (cl.on[a] || cl.on[b]) return c.message;
        }
        if (!constraints.empty()) return constraints.front().message;
        for (const auto& g : model_.groups()) {
            if (g.kind == GroupKind::alternative && cl.on[model_.index_of(g.parent)]) {
                return detail::group_conflict_message(model_, g);
            }
        }
        return "No valid configuration contains this feature";
    }

private:
    std::vector<const Clause*> all_clauses() const {
        auto out = pointers(enc_.structure);
        for (const auto& c : enc_.constraints) out.push_back(&c);
        return out;
    }

    const FeatureModel& model_;
    Encoding enc_;
    Solver full_;
};

}  // namespace

PropagationState propagate(const FeatureModel& model, const Configuration& partial) {
    const std::vector<char> chosen = detail::to_mask(model, partial.selected);
    const std::vector<char> implied = detail::to_mask(model, close_selection(model, partial).selected);
    const Propagator prop(model);

    PropagationState state;
    state.features.reserve(model.size());
    std::vector<char> assumed(chosen);
    for (std::size_t i = 0; i < model.size(); ++i) {
        FeatureState fs;
        if (chosen[i]) {
            fs.status = FeatureStatus::selected;
        } else {
            assumed[i] = 1;
            if (!prop.satisfiable(assumed)) {
                fs.status = FeatureStatus::disabled;
                fs.reason = prop.reason(assumed);
            } else if (implied[i]) {
                fs.status = FeatureStatus::implied_selected;
            }
            assumed[i] = 0;
        }
        state.features.emplace_back(model.features()[i].id, std::move(fs));
    }
    return state;
}

}  // namespace fairbench::extfm
