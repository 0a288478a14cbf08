#include <cmath>
#include <map>

#include "fairbench/error.hpp"
#include "fairbench/mitigation.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::mitigation {

namespace {

using Key = std::pair<std::uint32_t, int>;

struct Counts {
    std::map<Key, std::vector<std::size_t>> members;  // instances (original row ids, repeats allowed)
    std::map<std::uint32_t, std::size_t> combination;
    std::size_t label[2] = {0, 0};
    std::size_t n = 0;

    double ratio(const Key& k) const {
        const double nn = static_cast<double>(n);
        const double expected = (static_cast<double>(combination.at(k.first)) / nn) *
                                (static_cast<double>(label[k.second]) / nn);
        const double observed = static_cast<double>(members.at(k).size()) / nn;
        return expected / observed;
    }

    void add(const Key& k, std::size_t row) {
        members[k].push_back(row);
        ++combination[k.first];
        ++label[k.second];
        ++n;
    }
};

}  // namespace

std::vector<SubgroupRatio> subgroup_ratios(const data::BoundDataset& d) {
    Counts c;
    for (std::size_t r = 0; r < d.rows(); ++r) c.add({d.subgroup[r], d.labels[r] == 1.0 ? 1 : 0}, r);
    std::vector<SubgroupRatio> out;
    for (const auto& [k, rows] : c.members) {
        out.push_back({k.first, static_cast<double>(k.second), rows.size(), c.ratio(k)});
    }
    return out;
}

DemvResult demv_balance(const data::BoundDataset& train, double tolerance, std::size_t max_iterations,
                        std::uint64_t seed) {
    if (train.schema.task != data::Task::classification) throw InvalidArgument("DEMV needs a classification task");
    if (!(tolerance > 0.0)) throw InvalidArgument("DEMV tolerance must be positive");

    Counts c;
    for (std::size_t r = 0; r < train.rows(); ++r) c.add({train.subgroup[r], train.labels[r] == 1.0 ? 1 : 0}, r);
    std::vector<std::size_t> multiplicity(train.rows(), 1);
    Rng rng(seed);
    DemvResult out;

    while (true) {
        // Worst subgroup first; ties go to the lowest (combination, label).
        const Key* worst = nullptr;
        double worst_gap = 0.0;
        bool within = true;
        for (const auto& [k, rows] : c.members) {
            if (rows.empty()) continue;
            const double ratio = c.ratio(k);
            const double gap = std::fabs(ratio - 1.0);
            if (gap > tolerance) within = false;
            if (gap <= tolerance) continue;
            if (ratio < 1.0 && rows.size() == 1) {
                out.skipped_empty = true;
                continue;
            }
            if (!worst || gap > worst_gap) {
                worst = &k;
                worst_gap = gap;
            }
        }
        if (within) {
            out.converged = true;
            break;
        }
        if (!worst || out.iterations >= max_iterations) break;

        const Key key = *worst;
        auto& rows = c.members[key];
        const std::size_t pick = rng.index(rows.size());
        if (c.ratio(key) > 1.0) {
            const std::size_t row = rows[pick];
            c.add(key, row);
            ++multiplicity[row];
        } else {
            const std::size_t row = rows[pick];
            rows[pick] = rows.back();
            rows.pop_back();
            --c.combination[key.first];
            --c.label[key.second];
            --c.n;
            --multiplicity[row];
        }
        ++out.iterations;
    }

    std::vector<std::size_t> order;
    for (std::size_t r = 0; r < train.rows(); ++r) {
        for (std::size_t m = 0; m < multiplicity[r]; ++m) order.push_back(r);
    }
    out.data = out.iterations == 0 ? train : train.subset(order);
    return out;
}

}  // namespace fairbench::mitigation
