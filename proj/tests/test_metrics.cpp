#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairbench/error.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/rng.hpp"
#include "support.hpp"

using namespace fairbench;
using namespace fairbench::metrics;

using support::oracle_h;

namespace {

using Mask = std::vector<std::uint8_t>;
using Vec = std::vector<double>;

// Upper tail of chi-square(dof) by composite Simpson integration of the density.
double chi2_tail_integral(double x, double dof) {
    const double k = dof / 2;
    auto pdf = [&](double t) {
        if (t <= 0) return 0.0;
        return std::exp((k - 1) * std::log(t) - t / 2 - k * std::log(2.0) - std::lgamma(k));
    };
    // Substitute t = x + u/(1-u) to map [x, inf) onto [0, 1).
    const int steps = 200000;
    const double h = 1.0 / steps;
    double acc = 0;
    for (int i = 0; i <= steps; ++i) {
        const double u = std::min(i * h, 1 - 1e-12);
        const double t = x + u / (1 - u);
        const double f = pdf(t) / ((1 - u) * (1 - u));
        acc += f * (i == 0 || i == steps ? 1 : (i % 2 ? 4 : 2));
    }
    return acc * h / 3;
}

}  // namespace

TEST_CASE("accuracy and zero-one loss") {
    CHECK(accuracy(Vec{1, 0, 1}, Vec{1, 0, 1}) == 1.0);
    CHECK(zero_one_loss(Vec{1, 0, 1}, Vec{1, 0, 1}) == 0.0);
    CHECK(accuracy(Vec{1, 0, 1, 0}, Vec{1, 1, 0, 0}) == 0.5);
    CHECK(zero_one_loss(Vec{1, 0, 1, 0}, Vec{1, 1, 0, 0}) == 0.5);
    CHECK_THROWS_AS(accuracy(Vec{}, Vec{}), InvalidArgument);
    CHECK_THROWS_AS(accuracy(Vec{1}, Vec{1, 0}), InvalidArgument);
    Rng rng(1);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.index(50);
        Vec y(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = static_cast<double>(rng.index(2));
            p[i] = static_cast<double>(rng.index(2));
        }
        CHECK(accuracy(y, p) + zero_one_loss(y, p) == 1.0);
    }
}

TEST_CASE("statistical parity and disparate impact") {
    // privileged rows first: rate 3/4; unprivileged: rate 1/4
    const Mask m{1, 1, 1, 1, 0, 0, 0, 0};
    const Vec yhat{1, 1, 1, 0, 1, 0, 0, 0};
    CHECK(statistical_parity(yhat, m) == -0.5);
    CHECK(support::near(*disparate_impact(yhat, m), 1.0 / 3, 1e-15));
    CHECK(statistical_parity(Vec{1, 0, 1, 0}, Mask{1, 1, 0, 0}) == 0.0);
    CHECK(statistical_parity(Vec{1, 1, 1, 1}, Mask{1, 1, 0, 0}) == 0.0);
    CHECK(*disparate_impact(Vec{1, 0, 1, 0}, Mask{1, 1, 0, 0}) == 1.0);
    CHECK(*disparate_impact(Vec{0, 0, 0, 0}, Mask{1, 1, 0, 0}) == 1.0);
    CHECK_FALSE(disparate_impact(Vec{0, 0, 1, 0}, Mask{1, 1, 0, 0}));
    CHECK_THROWS_AS(statistical_parity(Vec{1, 0}, Mask{1, 1}), InvalidArgument);
    CHECK_FALSE(compute(MetricKind::statistical_parity, Vec{1, 0}, Vec{1, 0}, Mask{1, 1}));

    Rng rng(2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 4 + rng.index(40);
        Vec p(n);
        Mask mm(n), swapped(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = static_cast<double>(rng.index(2));
            mm[i] = i < 2 ? i : rng.index(2);
            swapped[i] = 1 - mm[i];
        }
        CHECK(statistical_parity(p, mm) == -statistical_parity(p, swapped));
        const auto a = disparate_impact(p, mm), b = disparate_impact(p, swapped);
        if (a && b && *a > 0) {
            CHECK(support::near(*a, 1.0 / *b, 1e-12));
            CHECK(support::near(to_goodness(MetricKind::disparate_impact, *a),
                                to_goodness(MetricKind::disparate_impact, *b), 1e-12));
        }
    }
}

TEST_CASE("average odds and equal opportunity") {
    // privileged: TPR 1, FPR 0; unprivileged: TPR 1/2, FPR 0
    const Mask m{1, 1, 1, 1, 0, 0, 0, 0};
    const Vec y{1, 1, 0, 0, 1, 1, 0, 0};
    const Vec yhat{1, 1, 0, 0, 1, 0, 0, 0};
    CHECK(*average_odds(y, yhat, m) == -0.25);
    CHECK(*equal_opportunity(y, yhat, m) == -0.5);
    CHECK(*average_odds(y, y, m) == 0.0);
    CHECK(*equal_opportunity(y, y, m) == 0.0);
    const Vec no_unpriv_pos{1, 1, 0, 0, 0, 0, 0, 0};
    CHECK_FALSE(average_odds(no_unpriv_pos, yhat, m));
    CHECK_FALSE(equal_opportunity(no_unpriv_pos, yhat, m));
}

TEST_CASE("regression errors") {
    CHECK(mean_absolute_error(Vec{1, 2}, Vec{1, 2}) == 0.0);
    CHECK(mean_squared_error(Vec{1, 2}, Vec{1, 2}) == 0.0);
    CHECK(mean_absolute_error(Vec{0, 0}, Vec{1, 3}) == 2.0);
    CHECK(mean_squared_error(Vec{0, 0}, Vec{1, 3}) == 5.0);
    CHECK_THROWS_AS(mean_squared_error(Vec{}, Vec{}), InvalidArgument);
}

TEST_CASE("goodness scale") {
    CHECK(to_goodness(MetricKind::accuracy, 0.8) == 0.8);
    CHECK(to_goodness(MetricKind::statistical_parity, -0.5) == 0.5);
    CHECK(support::near(to_goodness(MetricKind::disparate_impact, 3.0), 1.0 / 3, 1e-15));
    CHECK(to_goodness(MetricKind::disparate_impact, 0.0) == 0.0);
    CHECK(to_goodness(MetricKind::zero_one_loss, 0.25) == 0.75);
    CHECK(to_goodness(MetricKind::mean_squared_error, 1.0) == 0.5);
    CHECK_THROWS_AS(to_goodness(MetricKind::accuracy, NAN), InvalidArgument);

    const MetricKind all[] = {MetricKind::statistical_parity, MetricKind::disparate_impact, MetricKind::average_odds,
                              MetricKind::equal_opportunity,  MetricKind::accuracy,         MetricKind::zero_one_loss,
                              MetricKind::mean_absolute_error, MetricKind::mean_squared_error};
    for (auto k : all) {
        for (int i = 0; i <= 400; ++i) {
            const double raw = -2.0 + i * 0.01;
            const double g = to_goodness(k, raw);
            CHECK(g >= 0.0);
            CHECK(g <= 1.0);
        }
        CHECK(parse_metric_kind(to_string(k)) == k);
        CHECK(parse_report_code(report_code(k)) == k);
    }
    // Monotone toward the target.
    for (double v = 0; v < 1; v += 0.05) {
        CHECK(to_goodness(MetricKind::statistical_parity, v) >= to_goodness(MetricKind::statistical_parity, v + 0.05));
        CHECK(to_goodness(MetricKind::statistical_parity, -v) >= to_goodness(MetricKind::statistical_parity, -v - 0.05));
        CHECK(to_goodness(MetricKind::accuracy, v) <= to_goodness(MetricKind::accuracy, v + 0.05));
        CHECK(to_goodness(MetricKind::mean_absolute_error, v) >= to_goodness(MetricKind::mean_absolute_error, v + 0.05));
        CHECK(to_goodness(MetricKind::disparate_impact, 1 - v) >= to_goodness(MetricKind::disparate_impact, 0.95 - v));
        CHECK(to_goodness(MetricKind::disparate_impact, 1 + v) >= to_goodness(MetricKind::disparate_impact, 1.05 + v));
    }
    CHECK(orientation(MetricKind::disparate_impact) == Orientation::target_one);
    CHECK(orientation(MetricKind::zero_one_loss) == Orientation::lower_better);
}

TEST_CASE("harmonic mean") {
    CHECK(harmonic_mean(Vec{0.4, 0.4, 0.4}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(std::fabs(harmonic_mean(Vec{0.5, 1.0}) - 2.0 / 3) <= 1e-12);
    CHECK(harmonic_mean(Vec{0.5, 0.0}) == 0.0);
    CHECK_THROWS_AS(harmonic_mean(Vec{}), InvalidArgument);
    const Vec w{1, 3};
    CHECK(support::near(harmonic_mean(Vec{0.5, 1.0}, std::span<const double>(w)), 4.0 / (2 + 3), 1e-15));
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        Vec v(1 + rng.index(8));
        for (auto& x : v) x = rng.uniform(0.01, 1.0);
        const double am = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        CHECK(harmonic_mean(v) <= am + 1e-15);
    }
}

TEST_CASE("gamma_q special cases") {
    for (double x : {0.0, 0.1, 1.0, 2.5, 10.0, 40.0}) {
        CHECK(support::near(gamma_q(1.0, x), std::exp(-x), 1e-12));
        CHECK(support::near(gamma_q(0.5, x), std::erfc(std::sqrt(x)), 1e-12));
    }
}

TEST_CASE("kruskal wallis") {
    SUBCASE("separated groups") {
        const auto kw = kruskal_wallis({{1, 2, 3}, {4, 5, 6}});
        CHECK(support::near(kw.h, 27.0 / 7, 1e-12));
        CHECK(std::fabs(kw.h - 3.857) <= 0.001);
        CHECK(std::fabs(kw.p - 0.0495) <= 0.001);
        CHECK(support::near(kw.p, chi2_tail_integral(kw.h, 1), 1e-7));
    }
    SUBCASE("identical groups") {
        const auto kw = kruskal_wallis({{1, 2, 3}, {1, 2, 3}});
        CHECK(kw.h == 0.0);
        CHECK(kw.p == 1.0);
        const auto flat = kruskal_wallis({{5, 5}, {5, 5, 5}});
        CHECK(flat.h == 0.0);
        CHECK(flat.p == 1.0);
    }
    SUBCASE("ties match the midrank oracle") {
        const std::vector<Vec> g{{1, 1, 2}, {1, 2, 2}};
        CHECK(support::near(kruskal_wallis(g).h, oracle_h(g), 1e-9));
        Rng rng(9);
        for (int t = 0; t < 300; ++t) {
            std::vector<Vec> groups(2 + rng.index(3));
            for (auto& grp : groups) {
                grp.resize(1 + rng.index(8));
                for (auto& v : grp) v = static_cast<double>(rng.index(5));
            }
            Vec all;
            for (const auto& grp : groups) all.insert(all.end(), grp.begin(), grp.end());
            if (all.size() < 3 || std::all_of(all.begin(), all.end(), [&](double v) { return v == all[0]; })) continue;
            const auto kw = kruskal_wallis(groups);
            CHECK(support::near(kw.h, oracle_h(groups), 1e-9));
            CHECK(kw.p >= 0.0);
            CHECK(kw.p <= 1.0);
            const double dof = static_cast<double>(groups.size() - 1);
            if (kw.h > 0) CHECK(support::near(kw.p, chi2_tail_integral(kw.h, dof), 1e-6));
        }
    }
    SUBCASE("rank statistic is invariant under monotone transforms") {
        Rng rng(10);
        for (int t = 0; t < 100; ++t) {
            std::vector<Vec> groups(3);
            for (auto& grp : groups) {
                grp.resize(2 + rng.index(6));
                for (auto& v : grp) v = rng.uniform(-3, 3);
            }
            auto transformed = groups;
            for (auto& grp : transformed) {
                for (auto& v : grp) v = std::exp(v) * 5 + 1;
            }
            CHECK(support::near(kruskal_wallis(groups).h, kruskal_wallis(transformed).h, 1e-9));
        }
    }
    SUBCASE("chi-square p-value tracks a permutation test") {
        Rng rng(11);
        for (int t = 0; t < 5; ++t) {
            std::vector<Vec> groups(3, Vec(12));
            for (std::size_t g = 0; g < 3; ++g) {
                for (auto& v : groups[g]) v = rng.uniform(0, 1) + 0.15 * static_cast<double>(g);
            }
            const auto kw = kruskal_wallis(groups);
            Vec pooled;
            for (const auto& grp : groups) pooled.insert(pooled.end(), grp.begin(), grp.end());
            const int perms = 4000;
            int extreme = 0;
            for (int k = 0; k < perms; ++k) {
                rng.shuffle(std::span<double>(pooled));
                std::vector<Vec> pg(3);
                for (std::size_t i = 0; i < pooled.size(); ++i) pg[i / 12].push_back(pooled[i]);
                extreme += oracle_h(pg) >= kw.h - 1e-12;
            }
            const double perm_p = static_cast<double>(extreme) / perms;
            // Monte-Carlo standard error is at most 0.008 here; the asymptotic tail adds a little more.
            CHECK(std::fabs(perm_p - kw.p) <= 0.04);
        }
    }
    CHECK_THROWS_AS(kruskal_wallis({{1, 2, 3}}), InvalidArgument);
    CHECK_THROWS_AS(kruskal_wallis({{1}, {}}), InvalidArgument);
    CHECK_THROWS_AS(kruskal_wallis({{1}, {2}}), InvalidArgument);
}

TEST_CASE("metric questionnaire") {
    using M = std::vector<MetricKind>;
    CHECK(recommend_metrics({{"fairness_goal", "equal_outcomes"}}) ==
          M{MetricKind::statistical_parity, MetricKind::disparate_impact});
    CHECK(recommend_metrics({{"fairness_goal", "equal_error_rates"}}) ==
          M{MetricKind::average_odds, MetricKind::equal_opportunity});
    CHECK(recommend_metrics({{"fairness_goal", "both"}}) ==
          M{MetricKind::statistical_parity, MetricKind::disparate_impact, MetricKind::average_odds,
            MetricKind::equal_opportunity});
    CHECK(recommend_metrics({{"fairness_goal", "both"}, {"measure_preference", "ratio"}}) ==
          M{MetricKind::disparate_impact, MetricKind::average_odds, MetricKind::equal_opportunity});
    CHECK(recommend_metrics({{"task_type", "regression"}}) ==
          M{MetricKind::mean_absolute_error, MetricKind::mean_squared_error});
    CHECK_THROWS_AS(recommend_metrics({}), InvalidArgument);
    CHECK_THROWS_AS(recommend_metrics({{"fairness_goal", "vibes"}}), UnknownReferenceError);
    CHECK_THROWS_AS(recommend_metrics({{"colour", "red"}}), UnknownReferenceError);
    CHECK_FALSE(questionnaire_document().empty());
}
