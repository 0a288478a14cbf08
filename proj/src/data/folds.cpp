#include <cmath>
#include <string>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::data {

namespace {

// Shuffled row order; with `stratified`, positives first then negatives, each
// class shuffled independently. Dealing this order round-robin gives folds
// whose per-class counts are within one of proportional.
std::vector<std::size_t> ordered_rows(const BoundDataset& bound, std::uint64_t seed, bool stratified) {
    Rng rng(seed);
    const std::size_t n = bound.rows();
    if (!stratified) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(std::span<std::size_t>(order));
        return order;
    }
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < n; ++i) (bound.labels[i] == 1.0 ? pos : neg).push_back(i);
    rng.shuffle(std::span<std::size_t>(pos));
    rng.shuffle(std::span<std::size_t>(neg));
    pos.insert(pos.end(), neg.begin(), neg.end());
    return pos;
}

bool can_stratify(const BoundDataset& bound, std::size_t per_class_minimum) {
    if (bound.schema.task != Task::classification) return false;
    std::size_t pos = 0;
    for (double y : bound.labels) pos += y == 1.0 ? 1 : 0;
    const std::size_t neg = bound.rows() - pos;
    return pos >= per_class_minimum && neg >= per_class_minimum;
}

}  // namespace

Split FoldPlan::split(std::size_t fold) const {
    if (fold >= k) throw InvalidArgument("fold index out of range");
    Split s;
    for (std::size_t r = 0; r < assignment.size(); ++r) (assignment[r] == fold ? s.test : s.train).push_back(r);
    return s;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t f : assignment) ++sizes[f];
    return sizes;
}

FoldPlan make_folds(const BoundDataset& bound, std::size_t k, std::uint64_t seed, bool stratified) {
    const std::size_t n = bound.rows();
    if (k < 2 || k > n) {
        throw InvalidArgument("k must be between 2 and the row count (" + std::to_string(n) + "), got " +
                              std::to_string(k));
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.stratified = stratified && can_stratify(bound, k);
    plan.stratification_downgraded = stratified && !plan.stratified && bound.schema.task == Task::classification;

    const auto order = ordered_rows(bound, seed, plan.stratified);
    plan.assignment.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) plan.assignment[order[i]] = i % k;
    return plan;
}

Split make_holdout(const BoundDataset& bound, double test_fraction, std::uint64_t seed, bool stratified) {
    const std::size_t n = bound.rows();
    if (n < 2) throw InvalidArgument("holdout needs at least two rows");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("test fraction must be in (0, 1)");
    std::size_t n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    n_test = std::min(std::max<std::size_t>(n_test, 1), n - 1);

    const auto order = ordered_rows(bound, seed, stratified && can_stratify(bound, 1));
    std::vector<char> is_test(n, 0);
    // Systematic selection spreads the test rows evenly through `order`.
    for (std::size_t i = 0; i < n; ++i) {
        if ((i + 1) * n_test / n > i * n_test / n) is_test[order[i]] = 1;
    }
    Split s;
    for (std::size_t r = 0; r < n; ++r) (is_test[r] ? s.test : s.train).push_back(r);
    return s;
}

}  // namespace fairbench::data
