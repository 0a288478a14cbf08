#include "fairbench/bench.hpp"
#include "fairbench/error.hpp"

namespace fairbench::bench {

namespace {

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return false;
        if (a[i] > b[i]) strictly = true;
    }
    return strictly;
}

std::optional<double> harmonic_of_defined(const std::vector<std::optional<double>>& g) {
    std::vector<double> v;
    for (const auto& x : g) {
        if (x) v.push_back(*x);
    }
    if (v.empty()) return std::nullopt;
    return metrics::harmonic_mean(v);
}

std::optional<double> score_row(const std::vector<std::optional<double>>& g, const TradeoffSpec& t) {
    switch (t.kind) {
        case TradeoffKind::mean: {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& x : g) {
                if (x) {
                    sum += *x;
                    ++n;
                }
            }
            if (n == 0) return std::nullopt;
            return sum / static_cast<double>(n);
        }
        case TradeoffKind::weighted_sum: {
            if (t.weights.size() != g.size()) throw InvalidArgument("weighted sum needs one weight per metric");
            double sum = 0.0;
            double wsum = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!g[i]) continue;
                sum += t.weights[i] * *g[i];
                wsum += t.weights[i];
            }
            if (!(wsum > 0.0)) return std::nullopt;
            return sum / wsum;
        }
        case TradeoffKind::harmonic_mean:
        case TradeoffKind::pareto_front: return harmonic_of_defined(g);
    }
    return std::nullopt;
}

}  // namespace

std::vector<std::size_t> pareto_front(const std::vector<std::vector<double>>& goodness) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < goodness.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < goodness.size() && !dominated; ++j) {
            dominated = j != i && dominates(goodness[j], goodness[i]);
        }
        if (!dominated) front.push_back(i);
    }
    return front;
}

Aggregate aggregate(const std::vector<AggregateRow>& rows, const TradeoffSpec& tradeoff) {
    Aggregate out;
    out.scores.resize(rows.size());
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].failed) continue;
        out.scores[i] = score_row(rows[i].goodness, tradeoff);
        candidates.push_back(i);
    }
    if (candidates.empty()) throw Error("no combination completed; nothing to aggregate");

    if (tradeoff.kind == TradeoffKind::pareto_front) {
        std::vector<std::vector<double>> g;
        for (std::size_t i : candidates) {
            std::vector<double> v;
            for (const auto& x : rows[i].goodness) v.push_back(x.value_or(0.0));
            g.push_back(std::move(v));
        }
        for (std::size_t k : pareto_front(g)) out.front.push_back(candidates[k]);
        candidates = out.front;
    }

    bool found = false;
    for (std::size_t i : candidates) {
        if (!out.scores[i]) continue;
        if (!found || *out.scores[i] > *out.scores[out.best]) {
            out.best = i;
            found = true;
        }
    }
    // No defined score anywhere: fall back to the first eligible row.
    if (!found) out.best = candidates.front();
    return out;
}

}  // namespace fairbench::bench
