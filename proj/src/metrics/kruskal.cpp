#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairbench/error.hpp"
#include "fairbench/metrics.hpp"

namespace fairbench::metrics {

namespace {

constexpr double kTolerance = 1e-12;
constexpr int kMaxIterations = 10000;

// P(a, x) by its power series; converges quickly for x < a + 1.
double gamma_p_series(double a, double x, double log_prefix) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIterations; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < kTolerance * std::fabs(sum)) break;
    }
    return sum * std::exp(log_prefix);
}

// Q(a, x) by the modified Lentz continued fraction, for x >= a + 1.
double gamma_q_fraction(double a, double x, double log_prefix) {
    constexpr double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kTolerance) break;
    }
    return std::exp(log_prefix) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) throw InvalidArgument("gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x, log_prefix), 0.0, 1.0);
    return std::clamp(gamma_q_fraction(a, x, log_prefix), 0.0, 1.0);
}

KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& groups) {
    if (groups.size() < 2) throw InvalidArgument("Kruskal-Wallis needs at least two groups");
    std::size_t total = 0;
    for (const auto& g : groups) {
        if (g.empty()) throw InvalidArgument("Kruskal-Wallis groups must be non-empty");
        for (double v : g) {
            if (std::isnan(v)) throw InvalidArgument("Kruskal-Wallis input contains NaN");
        }
        total += g.size();
    }
    if (total < 3) throw InvalidArgument("Kruskal-Wallis needs at least three observations");

    struct Obs {
        double value;
        std::size_t group;
    };
    std::vector<Obs> pooled;
    pooled.reserve(total);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (double v : groups[g]) pooled.push_back({v, g});
    }
    std::sort(pooled.begin(), pooled.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });

    std::vector<double> rank_sum(groups.size(), 0.0);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < total;) {
        std::size_t j = i;
        while (j + 1 < total && pooled[j + 1].value == pooled[i].value) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) rank_sum[pooled[k].group] += midrank;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }

    const double n = static_cast<double>(total);
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) return {0.0, 1.0};
    const double center = (n + 1.0) / 2.0;
    double h = 0.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double ng = static_cast<double>(groups[g].size());
        const double dev = rank_sum[g] / ng - center;
        h += ng * dev * dev;
    }
    h = h * 12.0 / (n * (n + 1.0)) / correction;
    const double dof = static_cast<double>(groups.size() - 1);
    return {h, gamma_q(dof / 2.0, h / 2.0)};
}

}  // namespace fairbench::metrics
