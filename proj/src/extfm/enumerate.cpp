// Exhaustive enumeration of valid selections, used as the reference oracle for
// validate_configuration and propagate. It walks the tree top-down choosing
// children per group semantics and checks cross-tree constraints at the
// leaves; it shares no code with the SAT-based propagation.

#include <string>

#include "fairbench/error.hpp"
#include "fairbench/extfm.hpp"

namespace fairbench::extfm {

namespace {

using Option = std::vector<std::size_t>;
using Slot = std::vector<Option>;

class Enumerator {
public:
    Enumerator(const FeatureModel& model, const std::function<void(const std::vector<char>&)>& visit)
        : model_(model), visit_(visit), sel_(model.size(), 0), slots_(model.size()) {
        for (std::size_t p = 0; p < model.size(); ++p) slots_[p] = build_slots(p);
    }

    void run() {
        sel_[model_.root()] = 1;
        todo_.push_back(model_.root());
        expand();
    }

private:
    std::vector<Slot> build_slots(std::size_t p) const {
        std::vector<Slot> slots;
        for (std::size_t c : model_.children_of(p)) {
            if (model_.group_of(c) != FeatureModel::npos) continue;
            if (model_.is_mandatory_child(c)) {
                slots.push_back({{c}});
            } else {
                slots.push_back({{}, {c}});
            }
        }
        for (const auto& g : model_.groups()) {
            if (model_.index_of(g.parent) != p) continue;
            std::vector<std::size_t> members;
            for (const auto& m : g.members) members.push_back(model_.index_of(m));
            Slot slot;
            if (g.kind == GroupKind::alternative) {
                for (std::size_t m : members) slot.push_back({m});
            } else {
                const std::size_t subsets = std::size_t{1} << members.size();
                for (std::size_t mask = 1; mask < subsets; ++mask) {
                    Option opt;
                    for (std::size_t b = 0; b < members.size(); ++b) {
                        if (mask & (std::size_t{1} << b)) opt.push_back(members[b]);
                    }
                    slot.push_back(std::move(opt));
                }
            }
            slots.push_back(std::move(slot));
        }
        return slots;
    }

    bool constraints_hold() const {
        for (const auto& c : model_.constraints()) {
            const bool a = sel_[model_.index_of(c.a)];
            const bool b = sel_[model_.index_of(c.b)];
            if (c.kind == ConstraintKind::requires_feature ? (a && !b) : (a && b)) return false;
        }
        return true;
    }

    void expand() {
        if (todo_.empty()) {
            if (constraints_hold()) visit_(sel_);
            return;
        }
        const std::size_t p = todo_.back();
        todo_.pop_back();
        choose(slots_[p], 0);
        todo_.push_back(p);
    }

    void choose(const std::vector<Slot>& slots, std::size_t k) {
        if (k == slots.size()) {
            expand();
            return;
        }
        for (const Option& opt : slots[k]) {
            for (std::size_t c : opt) {
                sel_[c] = 1;
                todo_.push_back(c);
            }
            choose(slots, k + 1);
            for (std::size_t c : opt) {
                sel_[c] = 0;
                todo_.pop_back();
            }
        }
    }

    const FeatureModel& model_;
    const std::function<void(const std::vector<char>&)>& visit_;
    std::vector<char> sel_;
    std::vector<std::size_t> todo_;
    std::vector<std::vector<Slot>> slots_;
};

}  // namespace

void for_each_valid(const FeatureModel& model, const std::function<void(const std::vector<char>&)>& visit,
                    EnumerateOptions options) {
    if (model.size() > options.max_features) {
        throw InvalidArgument("feature model has " + std::to_string(model.size()) +
                              " features; enumeration is limited to " + std::to_string(options.max_features));
    }
    Enumerator(model, visit).run();
}

Enumeration enumerate_valid(const FeatureModel& model, EnumerateOptions options) {
    Enumeration out;
    for_each_valid(
        model,
        [&](const std::vector<char>& sel) {
            std::set<std::string> ids;
            for (std::size_t i = 0; i < sel.size(); ++i) {
                if (sel[i]) ids.insert(model.features()[i].id);
            }
            out.configurations.push_back(std::move(ids));
            ++out.count;
        },
        options);
    return out;
}

}  // namespace fairbench::extfm
