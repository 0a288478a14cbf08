#include <string>

#include "fairbench/bench.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::bench {

std::string_view to_string(TradeoffKind k) noexcept {
    switch (k) {
        case TradeoffKind::mean: return "mean";
        case TradeoffKind::weighted_sum: return "weighted-sum";
        case TradeoffKind::harmonic_mean: return "harmonic-mean";
        case TradeoffKind::pareto_front: return "pareto-front";
    }
    return "";
}

std::optional<TradeoffKind> parse_tradeoff_kind(std::string_view s) noexcept {
    for (auto k : {TradeoffKind::mean, TradeoffKind::weighted_sum, TradeoffKind::harmonic_mean,
                   TradeoffKind::pareto_front}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

void check_spec(const ExperimentSpec& spec) {
    if (spec.scalers.empty()) throw InvalidArgument("experiment needs at least one scaler entry");
    if (spec.learners.empty()) throw InvalidArgument("experiment needs at least one learner");
    if (spec.mitigations.empty()) throw InvalidArgument("experiment needs at least one mitigation entry");
    if (spec.metrics.empty()) throw InvalidArgument("experiment needs at least one metric");
    const data::Task task = spec.schema.task;
    for (const auto& l : spec.learners) {
        if (learners::capability(l.kind).task != task) {
            throw InvalidArgument("learner " + std::string(learners::to_string(l.kind)) + " does not fit a " +
                                  std::string(data::to_string(task)) + " task");
        }
    }
    bool needs_groups = false;
    for (auto m : spec.metrics) {
        if (metrics::task_of(m) != task) {
            throw InvalidArgument("metric " + std::string(metrics::to_string(m)) + " does not fit a " +
                                  std::string(data::to_string(task)) + " task");
        }
        needs_groups = needs_groups || metrics::needs_groups(m);
    }
    for (const auto& m : spec.mitigations) {
        mitigation::check_spec(m);
        if (m.kind != mitigation::MitigationKind::none) {
            if (task != data::Task::classification) throw InvalidArgument("mitigation needs a classification task");
            needs_groups = true;
        }
    }
    if (needs_groups && spec.schema.sensitive.empty()) {
        throw InvalidArgument("fairness metrics and mitigation need at least one sensitive feature");
    }
    if (task == data::Task::classification && !spec.schema.positive_value) {
        throw InvalidArgument("classification needs a positive label value");
    }
    if (spec.tradeoff.kind == TradeoffKind::weighted_sum) {
        if (spec.tradeoff.weights.size() != spec.metrics.size()) {
            throw InvalidArgument("weighted sum needs one weight per metric");
        }
        double total = 0.0;
        for (double w : spec.tradeoff.weights) {
            if (!(w >= 0.0)) throw InvalidArgument("trade-off weights must be non-negative");
            total += w;
        }
        if (!(total > 0.0)) throw InvalidArgument("trade-off weights must not sum to zero");
    }
    if (spec.validation.kind == ValidationSpec::Kind::k_fold && spec.validation.k < 2) {
        throw InvalidArgument("k-fold validation needs k >= 2");
    }
    if (spec.validation.kind == ValidationSpec::Kind::holdout &&
        !(spec.validation.test_fraction > 0.0 && spec.validation.test_fraction < 1.0)) {
        throw InvalidArgument("holdout test fraction must be in (0, 1)");
    }
}

std::string to_string(const CombinationKey& key) {
    return std::string(data::to_string(key.scaler)) + "/" + std::string(learners::to_string(key.learner)) + "/" +
           std::string(mitigation::to_string(key.mitigation));
}

std::vector<CombinationKey> plan(const ExperimentSpec& spec) {
    if (spec.learners.empty()) throw InvalidArgument("experiment needs at least one learner");
    std::vector<CombinationKey> keys;
    for (std::size_t s = 0; s < spec.scalers.size(); ++s) {
        for (std::size_t l = 0; l < spec.learners.size(); ++l) {
            for (std::size_t m = 0; m < spec.mitigations.size(); ++m) {
                const auto learner = spec.learners[l].kind;
                const auto method = spec.mitigations[m].kind;
                if (method == mitigation::MitigationKind::reweighing &&
                    !learners::capability(learner).supports_sample_weight) {
                    throw InvalidArgument("combination " + std::string(learners::to_string(learner)) +
                                          " with reweighing is not executable: the learner takes no sample weights");
                }
                keys.push_back({spec.scalers[s], learner, method, s, l, m});
            }
        }
    }
    return keys;
}

std::uint64_t unit_seed(std::uint64_t seed, std::size_t combination, std::size_t fold) {
    return derive_seed(seed, combination, fold);
}

}  // namespace fairbench::bench
