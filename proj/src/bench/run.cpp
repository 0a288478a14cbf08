#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "fairbench/bench.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::bench {

namespace {

struct UnitResult {
    bool failed = false;
    std::string error;
    std::vector<std::optional<double>> values;
    std::vector<std::string> flags;
};

struct Splits {
    std::vector<data::Split> folds;
    std::vector<std::string> flags;
};

Splits make_splits(const ExperimentSpec& spec, const data::BoundDataset& bound) {
    Splits out;
    const bool stratify = spec.validation.stratified && spec.schema.task == data::Task::classification;
    if (spec.validation.kind == ValidationSpec::Kind::holdout) {
        out.folds.push_back(data::make_holdout(bound, spec.validation.test_fraction, spec.seed, stratify));
        return out;
    }
    const auto plan = data::make_folds(bound, spec.validation.k, spec.seed, stratify);
    if (plan.stratification_downgraded) {
        out.flags.push_back("stratification disabled: a class has fewer than k rows");
    }
    for (std::size_t f = 0; f < plan.k; ++f) out.folds.push_back(plan.split(f));
    return out;
}

std::size_t combination_index(const ExperimentSpec& spec, const CombinationKey& key) {
    return (key.scaler_index * spec.learners.size() + key.learner_index) * spec.mitigations.size() +
           key.mitigation_index;
}

struct Prepared {
    data::Scaler scaler;
    mitigation::MitigationOutput mitigated;
};

// Scaling and mitigation see only `train`.
Prepared prepare(const ExperimentSpec& spec, const CombinationKey& key, const data::BoundDataset& train,
                 std::uint64_t seed) {
    Prepared p;
    std::vector<std::size_t> all(train.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    p.scaler = data::fit_scaler(key.scaler, train.features, all);
    const auto scaled = train.with_features(data::apply_scaler(p.scaler, train.features));
    p.mitigated = mitigation::apply(spec.mitigations[key.mitigation_index], scaled, mix_seed(seed ^ 0x6d69ULL));
    return p;
}

learners::FittedModel fit_learner(const ExperimentSpec& spec, const CombinationKey& key, std::size_t fold,
                                  const Prepared& p, std::uint64_t seed, const FitObserver& observer) {
    learners::LearnerSpec ls = spec.learners[key.learner_index];
    ls.seed = mix_seed(seed ^ 0x6c65ULL);
    const auto& m = p.mitigated;
    if (observer) observer(key, fold, m.data, m.weights);
    std::optional<std::span<const double>> w;
    if (m.weights) w = std::span<const double>(*m.weights);
    return learners::fit(ls, m.data.features, m.data.labels, w);
}

UnitResult run_unit(const ExperimentSpec& spec, const data::BoundDataset& bound, const CombinationKey& key,
                    std::size_t comb, std::size_t fold, const data::Split& split, const FitObserver& observer) {
    UnitResult r;
    try {
        const std::uint64_t seed = unit_seed(spec.seed, comb, fold);
        const auto train = bound.subset(split.train);
        const auto test = bound.subset(split.test);
        const Prepared p = prepare(spec, key, train, seed);
        for (const auto& f : p.mitigated.flags) r.flags.push_back(f);
        const auto model = fit_learner(spec, key, fold, p, seed, observer);
        for (const auto& f : model.flags) r.flags.push_back(f);

        const auto scaled_test = data::apply_scaler(p.scaler, test.features);
        const auto pred = learners::predict_detailed(model, scaled_test);
        if (pred.unseen_levels > 0) {
            r.flags.push_back("unseen categorical levels in test rows encoded as zeros");
        }
        for (auto m : spec.metrics) r.values.push_back(metrics::compute(m, test.labels, pred.values, test.privileged));
    } catch (const std::exception& e) {
        r.failed = true;
        r.error = e.what();
    }
    return r;
}

MetricSummary summarize(metrics::MetricKind kind, const std::vector<std::optional<double>>& values) {
    MetricSummary s;
    std::vector<double> defined;
    for (const auto& v : values) {
        if (v) {
            defined.push_back(*v);
        } else {
            ++s.undefined_folds;
        }
    }
    if (defined.empty()) return s;
    double sum = 0.0;
    for (double v : defined) sum += v;
    const double mean = sum / static_cast<double>(defined.size());
    double ss = 0.0;
    for (double v : defined) ss += (v - mean) * (v - mean);
    s.mean = mean;
    s.std = std::sqrt(ss / static_cast<double>(defined.size()));
    s.goodness = metrics::to_goodness(kind, mean);
    return s;
}

void add_flag(std::vector<std::string>& flags, std::string flag) {
    if (std::find(flags.begin(), flags.end(), flag) == flags.end()) flags.push_back(std::move(flag));
}

}  // namespace

QualityReport run_experiment(const ExperimentSpec& spec, const data::BoundDataset& bound, const RunOptions& options) {
    check_spec(spec);
    const auto keys = plan(spec);
    const Splits splits = make_splits(spec, bound);
    const std::size_t folds = splits.folds.size();
    const std::size_t total = keys.size() * folds;

    std::vector<UnitResult> units(total);
    std::mutex progress_mutex;
    std::size_t done = 0;
    auto tick = [&] {
        std::lock_guard<std::mutex> lock(progress_mutex);
        ++done;
        if (options.progress) {
            const double pct = done == total ? 100.0 : 100.0 * static_cast<double>(done) / static_cast<double>(total);
            options.progress(pct, done, total);
        }
    };
    auto work = [&](std::size_t u) {
        const std::size_t comb = u / folds;
        const std::size_t fold = u % folds;
        units[u] = run_unit(spec, bound, keys[comb], comb, fold, splits.folds[fold], options.fit_observer);
        tick();
    };

    const std::size_t threads = std::max<std::size_t>(1, std::min(options.threads, total));
    if (threads == 1) {
        for (std::size_t u = 0; u < total; ++u) work(u);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t u = next++; u < total; u = next++) work(u);
            });
        }
        for (auto& th : pool) th.join();
    }

    QualityReport report;
    report.metrics = spec.metrics;
    report.tradeoff = spec.tradeoff;
    report.folds = folds;
    report.flags = splits.flags;

    std::vector<AggregateRow> agg_rows;
    for (std::size_t c = 0; c < keys.size(); ++c) {
        ReportRow row;
        row.key = keys[c];
        const std::string label = to_string(keys[c]);
        for (std::size_t f = 0; f < folds; ++f) {
            const UnitResult& u = units[c * folds + f];
            for (const auto& flag : u.flags) add_flag(report.flags, label + ": " + flag);
            if (u.failed && !row.failed) {
                row.failed = true;
                row.error = "fold " + std::to_string(f) + ": " + u.error;
            }
        }
        AggregateRow ar;
        ar.failed = row.failed;
        if (row.failed) {
            row.metrics.assign(spec.metrics.size(), MetricSummary{});
            add_flag(report.flags, label + ": failed: " + row.error);
        } else {
            for (std::size_t m = 0; m < spec.metrics.size(); ++m) {
                std::vector<std::optional<double>> values;
                for (std::size_t f = 0; f < folds; ++f) values.push_back(units[c * folds + f].values[m]);
                MetricSummary s = summarize(spec.metrics[m], values);
                if (s.undefined_folds > 0) {
                    add_flag(report.flags, label + ": " + std::string(metrics::to_string(spec.metrics[m])) +
                                               " undefined in " + std::to_string(s.undefined_folds) + " of " +
                                               std::to_string(folds) + " folds");
                }
                ar.goodness.push_back(s.goodness);
                row.metrics.push_back(s);
            }
        }
        agg_rows.push_back(std::move(ar));
        report.rows.push_back(std::move(row));
    }

    bool any_ok = false;
    for (const auto& r : report.rows) any_ok = any_ok || !r.failed;
    if (!any_ok) throw Error("every combination failed; first error: " + report.rows.front().error);

    const Aggregate a = aggregate(agg_rows, spec.tradeoff);
    report.best = a.best;
    report.front = a.front;
    for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].score = a.scores[i];
    for (std::size_t i : a.front) report.rows[i].on_front = true;
    return report;
}

learners::FittedModel finalize(const ExperimentSpec& spec, const data::BoundDataset& bound, const CombinationKey& key,
                               const FitObserver& observer) {
    check_spec(spec);
    const std::size_t folds =
        spec.validation.kind == ValidationSpec::Kind::holdout ? 1 : spec.validation.k;
    const std::uint64_t seed = unit_seed(spec.seed, combination_index(spec, key), folds);
    const Prepared p = prepare(spec, key, bound, seed);
    auto model = fit_learner(spec, key, folds, p, seed, observer);
    for (const auto& f : p.mitigated.flags) model.flags.push_back(f);
    if (key.scaler != data::ScalerKind::none) model.scaler = p.scaler;
    return model;
}

}  // namespace fairbench::bench
