#pragma once

// Effectiveness and group-fairness metrics, the goodness scale used for
// aggregation, the Kruskal-Wallis H test and the metric questionnaire.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbench/data.hpp"

namespace fairbench::metrics {

enum class MetricKind {
    statistical_parity,
    disparate_impact,
    average_odds,
    equal_opportunity,
    accuracy,
    zero_one_loss,
    mean_absolute_error,
    mean_squared_error,
};

enum class Orientation { higher_better, lower_better, target_zero, target_one };

/// "statistical-parity", "disparate-impact", ...
std::string_view to_string(MetricKind k) noexcept;
std::optional<MetricKind> parse_metric_kind(std::string_view s) noexcept;
/// Short column prefix used in reports: sp, di, ao, eo, acc, zo_loss, mae, mse.
std::string_view report_code(MetricKind k) noexcept;
std::optional<MetricKind> parse_report_code(std::string_view s) noexcept;
Orientation orientation(MetricKind k) noexcept;
data::Task task_of(MetricKind k) noexcept;
bool needs_groups(MetricKind k) noexcept;

// Labels are 1.0 (positive) / 0.0; `privileged` is the per-row group mask.
// Length mismatches and empty inputs throw InvalidArgument.

double accuracy(std::span<const double> y, std::span<const double> yhat);
double zero_one_loss(std::span<const double> y, std::span<const double> yhat);

/// P(yhat=1 | unprivileged) - P(yhat=1 | privileged). Empty group throws.
double statistical_parity(std::span<const double> yhat, std::span<const std::uint8_t> privileged);
/// Ratio of the same rates; 1.0 when both are 0, nullopt when only the privileged rate is 0.
std::optional<double> disparate_impact(std::span<const double> yhat, std::span<const std::uint8_t> privileged);
/// nullopt when a group lacks actual positives or actual negatives.
std::optional<double> average_odds(std::span<const double> y, std::span<const double> yhat,
                                   std::span<const std::uint8_t> privileged);
/// nullopt when a group lacks actual positives.
std::optional<double> equal_opportunity(std::span<const double> y, std::span<const double> yhat,
                                        std::span<const std::uint8_t> privileged);

double mean_absolute_error(std::span<const double> y, std::span<const double> yhat);
double mean_squared_error(std::span<const double> y, std::span<const double> yhat);

/// Any metric by kind; nullopt marks an undefined value (including an empty group).
std::optional<double> compute(MetricKind k, std::span<const double> y, std::span<const double> yhat,
                              std::span<const std::uint8_t> privileged);

/// Maps a raw value onto [0, 1], higher is better. NaN throws.
double to_goodness(MetricKind k, double raw);

/// n / sum(1/v), or sum(w) / sum(w/v) when weighted; 0 when any weighted value is 0.
double harmonic_mean(std::span<const double> values, std::optional<std::span<const double>> weights = std::nullopt);

struct KruskalWallis {
    double h = 0.0;
    double p = 1.0;
};

/// Tie-corrected H with a chi-square(groups-1) tail. Needs >= 2 non-empty groups, N >= 3.
KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups);

/// Regularized upper incomplete gamma Q(a, x) for a > 0, x >= 0.
double gamma_q(double a, double x);

/// The questionnaire document (schema and mapping rules).
std::string_view questionnaire_document();

/// Answers keyed by question id. Unknown questions/options raise
/// UnknownReferenceError; a missing required answer raises InvalidArgument.
/// Result is in MetricKind declaration order.
std::vector<MetricKind> recommend_metrics(const std::map<std::string, std::string>& answers);

}  // namespace fairbench::metrics
