#pragma once

// Grid-search benchmarking: every (scaler, learner, mitigation) combination
// is cross-validated, summarized per metric, scored by a trade-off strategy,
// and the best one is refit on the full data.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/data.hpp"
#include "fairbench/learners.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/mitigation.hpp"

namespace fairbench::bench {

enum class TradeoffKind { mean, weighted_sum, harmonic_mean, pareto_front };

/// "mean", "weighted-sum", "harmonic-mean", "pareto-front".
std::string_view to_string(TradeoffKind k) noexcept;
std::optional<TradeoffKind> parse_tradeoff_kind(std::string_view s) noexcept;

struct TradeoffSpec {
    TradeoffKind kind = TradeoffKind::mean;
    std::vector<double> weights;  ///< weighted_sum only, one per metric
};

struct ValidationSpec {
    enum class Kind { holdout, k_fold } kind = Kind::k_fold;
    double test_fraction = 0.3;
    std::size_t k = 5;
    bool stratified = true;
};

struct ExperimentSpec {
    data::DatasetSchema schema;
    std::vector<data::ScalerKind> scalers;
    std::vector<learners::LearnerSpec> learners;
    std::vector<mitigation::MitigationSpec> mitigations;
    std::vector<metrics::MetricKind> metrics;
    TradeoffSpec tradeoff;
    ValidationSpec validation;
    std::uint64_t seed = 0;
};

/// Checks the structural invariants (non-empty lists, weights, task
/// agreement). Throws InvalidArgument.
void check_spec(const ExperimentSpec& spec);

struct CombinationKey {
    data::ScalerKind scaler = data::ScalerKind::none;
    learners::LearnerKind learner = learners::LearnerKind::logistic_regression;
    mitigation::MitigationKind mitigation = mitigation::MitigationKind::none;
    std::size_t scaler_index = 0;
    std::size_t learner_index = 0;
    std::size_t mitigation_index = 0;
};

/// "scaler/learner/mitigation", e.g. "standard/logistic-regression/reweighing".
std::string to_string(const CombinationKey& key);

/// Scalers outer, learners middle, mitigations inner. Throws InvalidArgument
/// for an empty learner list or a learner/mitigation pair the capability
/// table forbids.
std::vector<CombinationKey> plan(const ExperimentSpec& spec);

struct MetricSummary {
    std::optional<double> mean;
    std::optional<double> std;  ///< population formula over the folds where the metric is defined
    std::optional<double> goodness;
    std::size_t undefined_folds = 0;
};

struct ReportRow {
    CombinationKey key;
    bool failed = false;
    std::string error;
    std::vector<MetricSummary> metrics;  ///< spec metric order
    std::optional<double> score;
    bool on_front = false;
};

struct QualityReport {
    std::vector<metrics::MetricKind> metrics;
    TradeoffSpec tradeoff;
    std::size_t folds = 0;
    std::vector<ReportRow> rows;  ///< plan order
    std::size_t best = 0;         ///< index into rows
    std::vector<std::size_t> front;  ///< pareto mode only
    std::vector<std::string> flags;
};

/// Called once per (combination, fold) unit with the running percentage;
/// the final call reports exactly 100.
using ProgressSink = std::function<void(double percent, std::size_t done, std::size_t total)>;

/// Sees the exact training data handed to each learner fit.
using FitObserver = std::function<void(const CombinationKey& key, std::size_t fold, const data::BoundDataset& train,
                                       const std::optional<std::vector<double>>& weights)>;

struct RunOptions {
    std::size_t threads = 1;
    ProgressSink progress;
    FitObserver fit_observer;
};

/// Throws Error when every combination fails.
QualityReport run_experiment(const ExperimentSpec& spec, const data::BoundDataset& bound,
                             const RunOptions& options = {});

struct AggregateRow {
    bool failed = false;
    std::vector<std::optional<double>> goodness;
};

struct Aggregate {
    std::size_t best = 0;
    std::vector<std::optional<double>> scores;
    std::vector<std::size_t> front;
};

/// Scores every non-failed row. Undefined goodness values are left out of
/// the mean/weighted/harmonic scores and count as 0 when testing dominance.
/// Pareto mode picks the front member with the highest harmonic mean.
Aggregate aggregate(const std::vector<AggregateRow>& rows, const TradeoffSpec& tradeoff);

/// Non-dominated rows (a dominates b iff a >= b everywhere and > somewhere).
std::vector<std::size_t> pareto_front(const std::vector<std::vector<double>>& goodness);

/// Refits `key` on the full dataset; the fitted scaler is stored in the model.
learners::FittedModel finalize(const ExperimentSpec& spec, const data::BoundDataset& bound, const CombinationKey& key,
                               const FitObserver& observer = {});

std::string report_csv(const QualityReport& report);
/// JSON result document (rows, best key, front, flags).
std::string report_document(const QualityReport& report);

inline constexpr std::string_view kModelMagic = "FBM1";
inline constexpr int kModelFormatVersion = 1;

std::string serialize_model(const learners::FittedModel& model);
/// Throws ParseError on bad magic, unsupported version or a malformed payload.
learners::FittedModel deserialize_model(std::string_view bytes);

/// Seed of the work unit (combination, fold); finalize uses fold = folds.
std::uint64_t unit_seed(std::uint64_t seed, std::size_t combination, std::size_t fold);

}  // namespace fairbench::bench
