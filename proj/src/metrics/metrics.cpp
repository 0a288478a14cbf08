#include <algorithm>
#include <cmath>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/metrics.hpp"

namespace fairbench::metrics {

namespace {

constexpr MetricKind kAll[] = {MetricKind::statistical_parity, MetricKind::disparate_impact,
                               MetricKind::average_odds,       MetricKind::equal_opportunity,
                               MetricKind::accuracy,           MetricKind::zero_one_loss,
                               MetricKind::mean_absolute_error, MetricKind::mean_squared_error};

void check_pair(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InvalidArgument("metric inputs are empty");
    if (a.size() != b.size()) throw InvalidArgument("metric inputs differ in length");
}

void check_mask(std::size_t n, std::span<const std::uint8_t> mask) {
    if (n == 0) throw InvalidArgument("metric inputs are empty");
    if (mask.size() != n) throw InvalidArgument("group mask length differs from predictions");
}

struct Rates {
    double positives[2] = {0, 0};
    double total[2] = {0, 0};
};

// Positive-prediction counts per group (index 1 = privileged).
Rates selection(std::span<const double> yhat, std::span<const std::uint8_t> priv) {
    Rates r;
    for (std::size_t i = 0; i < yhat.size(); ++i) {
        const int g = priv[i] ? 1 : 0;
        r.total[g] += 1;
        r.positives[g] += yhat[i] == 1.0 ? 1 : 0;
    }
    return r;
}

struct Confusion {
    double tp = 0, fp = 0, tn = 0, fn = 0;
};

void confusion(std::span<const double> y, std::span<const double> yhat, std::span<const std::uint8_t> priv,
               Confusion out[2]) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        Confusion& c = out[priv[i] ? 1 : 0];
        const bool actual = y[i] == 1.0;
        const bool predicted = yhat[i] == 1.0;
        if (actual && predicted) c.tp += 1;
        if (actual && !predicted) c.fn += 1;
        if (!actual && predicted) c.fp += 1;
        if (!actual && !predicted) c.tn += 1;
    }
}

bool both_groups(std::span<const std::uint8_t> priv) {
    bool seen[2] = {false, false};
    for (auto p : priv) seen[p ? 1 : 0] = true;
    return seen[0] && seen[1];
}

}  // namespace

std::string_view to_string(MetricKind k) noexcept {
    switch (k) {
        case MetricKind::statistical_parity: return "statistical-parity";
        case MetricKind::disparate_impact: return "disparate-impact";
        case MetricKind::average_odds: return "average-odds";
        case MetricKind::equal_opportunity: return "equal-opportunity";
        case MetricKind::accuracy: return "accuracy";
        case MetricKind::zero_one_loss: return "zero-one-loss";
        case MetricKind::mean_absolute_error: return "mean-absolute-error";
        case MetricKind::mean_squared_error: return "mean-squared-error";
    }
    return "";
}

std::optional<MetricKind> parse_metric_kind(std::string_view s) noexcept {
    for (auto k : kAll) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view report_code(MetricKind k) noexcept {
    switch (k) {
        case MetricKind::statistical_parity: return "sp";
        case MetricKind::disparate_impact: return "di";
        case MetricKind::average_odds: return "ao";
        case MetricKind::equal_opportunity: return "eo";
        case MetricKind::accuracy: return "acc";
        case MetricKind::zero_one_loss: return "zo_loss";
        case MetricKind::mean_absolute_error: return "mae";
        case MetricKind::mean_squared_error: return "mse";
    }
    return "";
}

std::optional<MetricKind> parse_report_code(std::string_view s) noexcept {
    for (auto k : kAll) {
        if (report_code(k) == s) return k;
    }
    return std::nullopt;
}

Orientation orientation(MetricKind k) noexcept {
    switch (k) {
        case MetricKind::accuracy: return Orientation::higher_better;
        case MetricKind::zero_one_loss:
        case MetricKind::mean_absolute_error:
        case MetricKind::mean_squared_error: return Orientation::lower_better;
        case MetricKind::disparate_impact: return Orientation::target_one;
        default: return Orientation::target_zero;
    }
}

data::Task task_of(MetricKind k) noexcept {
    return k == MetricKind::mean_absolute_error || k == MetricKind::mean_squared_error ? data::Task::regression
                                                                                         : data::Task::classification;
}

bool needs_groups(MetricKind k) noexcept {
    return k == MetricKind::statistical_parity || k == MetricKind::disparate_impact ||
           k == MetricKind::average_odds || k == MetricKind::equal_opportunity;
}

double accuracy(std::span<const double> y, std::span<const double> yhat) {
    check_pair(y, yhat);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += y[i] == yhat[i] ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

double zero_one_loss(std::span<const double> y, std::span<const double> yhat) { return 1.0 - accuracy(y, yhat); }

double statistical_parity(std::span<const double> yhat, std::span<const std::uint8_t> privileged) {
    check_mask(yhat.size(), privileged);
    const Rates r = selection(yhat, privileged);
    if (r.total[0] == 0 || r.total[1] == 0) throw InvalidArgument("statistical parity needs both groups");
    return r.positives[0] / r.total[0] - r.positives[1] / r.total[1];
}

std::optional<double> disparate_impact(std::span<const double> yhat, std::span<const std::uint8_t> privileged) {
    check_mask(yhat.size(), privileged);
    const Rates r = selection(yhat, privileged);
    if (r.total[0] == 0 || r.total[1] == 0) throw InvalidArgument("disparate impact needs both groups");
    const double unpriv = r.positives[0] / r.total[0];
    const double priv = r.positives[1] / r.total[1];
    if (priv == 0.0) return unpriv == 0.0 ? std::optional<double>(1.0) : std::nullopt;
    return unpriv / priv;
}

std::optional<double> average_odds(std::span<const double> y, std::span<const double> yhat,
                                   std::span<const std::uint8_t> privileged) {
    check_pair(y, yhat);
    check_mask(y.size(), privileged);
    Confusion c[2];
    confusion(y, yhat, privileged, c);
    for (const auto& g : c) {
        if (g.tp + g.fn == 0 || g.fp + g.tn == 0) return std::nullopt;
    }
    auto tpr = [](const Confusion& g) { return g.tp / (g.tp + g.fn); };
    auto fpr = [](const Confusion& g) { return g.fp / (g.fp + g.tn); };
    return 0.5 * ((fpr(c[0]) - fpr(c[1])) + (tpr(c[0]) - tpr(c[1])));
}

std::optional<double> equal_opportunity(std::span<const double> y, std::span<const double> yhat,
                                        std::span<const std::uint8_t> privileged) {
    check_pair(y, yhat);
    check_mask(y.size(), privileged);
    Confusion c[2];
    confusion(y, yhat, privileged, c);
    for (const auto& g : c) {
        if (g.tp + g.fn == 0) return std::nullopt;
    }
    return c[0].tp / (c[0].tp + c[0].fn) - c[1].tp / (c[1].tp + c[1].fn);
}

double mean_absolute_error(std::span<const double> y, std::span<const double> yhat) {
    check_pair(y, yhat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::fabs(y[i] - yhat[i]);
    return acc / static_cast<double>(y.size());
}

double mean_squared_error(std::span<const double> y, std::span<const double> yhat) {
    check_pair(y, yhat);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    return acc / static_cast<double>(y.size());
}

std::optional<double> compute(MetricKind k, std::span<const double> y, std::span<const double> yhat,
                              std::span<const std::uint8_t> privileged) {
    if (needs_groups(k)) {
        check_mask(yhat.size(), privileged);
        if (!both_groups(privileged)) return std::nullopt;
    }
    switch (k) {
        case MetricKind::statistical_parity: return statistical_parity(yhat, privileged);
        case MetricKind::disparate_impact: return disparate_impact(yhat, privileged);
        case MetricKind::average_odds: return average_odds(y, yhat, privileged);
        case MetricKind::equal_opportunity: return equal_opportunity(y, yhat, privileged);
        case MetricKind::accuracy: return accuracy(y, yhat);
        case MetricKind::zero_one_loss: return zero_one_loss(y, yhat);
        case MetricKind::mean_absolute_error: return mean_absolute_error(y, yhat);
        case MetricKind::mean_squared_error: return mean_squared_error(y, yhat);
    }
    return std::nullopt;
}

double to_goodness(MetricKind k, double raw) {
    if (std::isnan(raw)) throw InvalidArgument("cannot convert an undefined " + std::string(to_string(k)) + " value");
    switch (k) {
        case MetricKind::accuracy: return std::clamp(raw, 0.0, 1.0);
        case MetricKind::zero_one_loss: return std::clamp(1.0 - raw, 0.0, 1.0);
        case MetricKind::mean_absolute_error:
        case MetricKind::mean_squared_error: return 1.0 / (1.0 + std::max(raw, 0.0));
        case MetricKind::disparate_impact: return raw > 0.0 ? std::min(raw, 1.0 / raw) : 0.0;
        default: return 1.0 - std::min(std::fabs(raw), 1.0);
    }
}

double harmonic_mean(std::span<const double> values, std::optional<std::span<const double>> weights) {
    if (values.empty()) throw InvalidArgument("harmonic mean of an empty list");
    if (weights && weights->size() != values.size()) throw InvalidArgument("weight count differs from value count");
    double wsum = 0.0;
    double inv = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const double w = weights ? (*weights)[i] : 1.0;
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("harmonic mean inputs must lie in [0, 1]");
        if (!(w >= 0.0)) throw InvalidArgument("harmonic mean weights must be non-negative");
        if (w == 0.0) continue;
        if (v == 0.0) return 0.0;
        wsum += w;
        inv += w / v;
    }
    if (wsum == 0.0) throw InvalidArgument("harmonic mean weights sum to zero");
    return wsum / inv;
}

}  // namespace fairbench::metrics
