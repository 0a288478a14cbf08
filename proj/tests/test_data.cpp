#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"
#include "support.hpp"

using namespace fairbench;
using namespace fairbench::data;

namespace {

BoundDataset labelled(std::size_t pos, std::size_t neg) {
    std::vector<double> x;
    std::vector<std::string> s, y;
    for (std::size_t i = 0; i < pos + neg; ++i) {
        x.push_back(static_cast<double>(i));
        s.push_back(i % 2 ? "p" : "u");
        y.push_back(i < pos ? "1" : "0");
    }
    return support::make_bound(x, s, y);
}

void check_partition(const FoldPlan& plan, std::size_t n) {
    REQUIRE(plan.assignment.size() == n);
    std::vector<int> seen(n, 0);
    for (std::size_t f = 0; f < plan.k; ++f) {
        const auto split = plan.split(f);
        CHECK(split.train.size() + split.test.size() == n);
        for (auto r : split.test) {
            CHECK(plan.assignment[r] == f);
            ++seen[r];
        }
    }
    for (int c : seen) CHECK(c == 1);
    const auto sizes = plan.fold_sizes();
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
}

}  // namespace

TEST_CASE("parse_csv typing and errors") {
    const auto t = parse_csv("a,b\n1,2\n3,4");
    CHECK(t.rows() == 2);
    CHECK(t.cols() == 2);
    CHECK(t.column("a").type == ColumnType::numeric);
    CHECK(t.column("b").numbers == std::vector<double>{2, 4});

    CHECK(parse_csv("g\nA\nB").column("g").type == ColumnType::categorical);
    CHECK(parse_csv("g\n1\nx").column("g").type == ColumnType::categorical);

    try {
        parse_csv("a\n1\n1,2");
        FAIL("expected a ragged-row error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("row 3") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    CHECK_THROWS_AS(parse_csv("a,a\n1,2"), ParseError);
    CHECK_THROWS_AS(parse_csv("a\n\"open"), ParseError);
}

TEST_CASE("csv dialect: quotes, CRLF, empty cells") {
    const auto t = parse_csv("name,n\r\n\"Smith, J\",1\r\n\"say \"\"hi\"\"\",\r\n");
    CHECK(t.rows() == 2);
    CHECK(t.column("name").labels[0] == "Smith, J");
    CHECK(t.column("name").labels[1] == "say \"hi\"");
    CHECK(t.column("n").type == ColumnType::numeric);
    CHECK(t.column("n").is_missing(1));
}

TEST_CASE("csv round trip preserves values and types") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> nums;
        std::vector<std::string> cats;
        for (int i = 0; i < 30; ++i) {
            nums.push_back(rng.uniform(-1e6, 1e6) / 7.0);
            cats.push_back(rng.unit() < 0.5 ? "a,b" : "q\"x");
        }
        const DataTable t({Column::numeric("n", nums), Column::categorical("c", cats)});
        const DataTable back = parse_csv(to_csv(t));
        CHECK(back == t);
    }
    const auto synth = make_synthetic_biased({50, 9, 1.0});
    CHECK(parse_csv(to_csv(synth)) == synth);
}

TEST_CASE("bind_schema") {
    const DataTable t({Column::categorical("sex", {"M", "M", "F", "F"}),
                       Column::categorical("race", {"W", "B", "W", "B"}), Column::numeric("age", {1, 2, 3, 4}),
                       Column::categorical("y", {"yes", "no", "no", "yes"})});
    DatasetSchema s;
    s.label_column = "y";
    s.positive_value = "yes";
    s.sensitive = parse_sensitive_features("sex=M;race=W");
    const auto b = bind_schema(t, s);
    CHECK(b.privileged == std::vector<std::uint8_t>{1, 0, 0, 0});
    CHECK(b.labels == std::vector<double>{1, 0, 0, 1});
    CHECK_FALSE(b.features.find("y"));
    CHECK(b.features.find("sex"));
    // four distinct (sex, race) combinations
    std::set<std::uint32_t> groups(b.subgroup.begin(), b.subgroup.end());
    CHECK(groups.size() == 4);

    SUBCASE("missing column is named") {
        auto s2 = s;
        s2.sensitive = {{"age2", {"1"}}};
        try {
            bind_schema(t, s2);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(std::string(e.what()).find("age2") != std::string::npos);
        }
    }
    SUBCASE("positive value absent") {
        auto s2 = s;
        s2.positive_value = "maybe";
        CHECK_THROWS_AS(bind_schema(t, s2), InvalidArgument);
    }
    SUBCASE("privileged mask ignores non-sensitive columns") {
        const DataTable t2({Column::categorical("sex", {"M", "M", "F", "F"}),
                            Column::categorical("race", {"W", "B", "W", "B"}), Column::numeric("age", {4, 3, 2, 1}),
                            Column::categorical("y", {"yes", "no", "no", "yes"})});
        CHECK(bind_schema(t2, s).privileged == b.privileged);
    }
    SUBCASE("missing cells are rejected") {
        const DataTable t3({Column::numeric("age", {1, NAN}), Column::categorical("sex", {"M", "F"}),
                            Column::categorical("y", {"yes", "no"})});
        auto s3 = s;
        s3.sensitive = {{"sex", {"M"}}};
        CHECK_THROWS_AS(bind_schema(t3, s3), InvalidArgument);
    }
    SUBCASE("sensitive feature text round trip") {
        CHECK(format_sensitive_features(parse_sensitive_features("sex=M;race=W|A")) == "sex=M;race=W|A");
        CHECK_THROWS_AS(parse_sensitive_features("sex"), ParseError);
    }
}

TEST_CASE("make_folds") {
    SUBCASE("ten rows, five folds") {
        const auto plan = make_folds(labelled(5, 5), 5, 1, false);
        for (auto s : plan.fold_sizes()) CHECK(s == 2);
        check_partition(plan, 10);
    }
    SUBCASE("stratified six positives over two folds") {
        const auto b = labelled(6, 4);
        const auto plan = make_folds(b, 2, 42, true);
        CHECK(plan.stratified);
        for (std::size_t f = 0; f < 2; ++f) {
            std::size_t pos = 0;
            for (auto r : plan.split(f).test) pos += b.labels[r] == 1.0;
            CHECK(pos == 3);
        }
    }
    SUBCASE("k out of range") {
        CHECK_THROWS_AS(make_folds(labelled(5, 5), 11, 0, false), InvalidArgument);
        CHECK_THROWS_AS(make_folds(labelled(5, 5), 1, 0, false), InvalidArgument);
    }
    SUBCASE("stratification downgrades when a class is too small") {
        const auto plan = make_folds(labelled(2, 8), 5, 0, true);
        CHECK(plan.stratification_downgraded);
        check_partition(plan, 10);
    }
    SUBCASE("random plans are deterministic partitions and stratified ones are proportional") {
        Rng rng(8);
        for (int trial = 0; trial < 200; ++trial) {
            const std::size_t pos = 2 + rng.index(40), neg = 2 + rng.index(40);
            const std::size_t n = pos + neg;
            const std::size_t k = 2 + rng.index(std::min<std::size_t>(pos, neg) - 1);
            const auto b = labelled(pos, neg);
            const std::uint64_t seed = rng.engine()();
            const auto plan = make_folds(b, k, seed, true);
            CHECK(plan.assignment == make_folds(b, k, seed, true).assignment);
            check_partition(plan, n);
            REQUIRE_FALSE(plan.stratification_downgraded);
            const auto sizes = plan.fold_sizes();
            for (std::size_t f = 0; f < k; ++f) {
                double p = 0;
                for (auto r : plan.split(f).test) p += b.labels[r];
                const double proportional = static_cast<double>(pos) * static_cast<double>(sizes[f]) / n;
                CHECK(std::fabs(p - proportional) <= 1.0 + 1e-12);
            }
        }
    }
}

TEST_CASE("make_holdout") {
    const auto b = labelled(10, 10);
    const auto s = make_holdout(b, 0.3, 5, true);
    CHECK(s.test.size() == 6);
    CHECK(s.train.size() == 14);
    std::size_t pos = 0;
    for (auto r : s.test) pos += b.labels[r] == 1.0;
    CHECK(pos == 3);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(20);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(all == expect);
    CHECK(make_holdout(labelled(1, 1), 0.01, 0, true).test.size() == 1);
    CHECK_THROWS_AS(make_holdout(b, 1.0, 0, true), InvalidArgument);
}

TEST_CASE("scalers") {
    const DataTable t({Column::numeric("v", {1, 2, 3}), Column::numeric("c", {5, 5, 5}),
                       Column::categorical("g", {"a", "b", "a"})});
    const std::vector<std::size_t> all{0, 1, 2};

    const auto std_t = apply_scaler(fit_scaler(ScalerKind::standard, t, all), t);
    CHECK(std_t.column("v").numbers[0] == doctest::Approx(-1.224745).epsilon(1e-6));
    CHECK(std_t.column("v").numbers[1] == 0.0);
    CHECK(std_t.column("v").numbers[2] == doctest::Approx(1.224745).epsilon(1e-6));
    CHECK(std_t.column("c").numbers == std::vector<double>{0, 0, 0});
    CHECK(std_t.column("g").labels == t.column("g").labels);

    const DataTable two({Column::numeric("v", {2, 4})});
    const std::vector<std::size_t> both{0, 1};
    CHECK(apply_scaler(fit_scaler(ScalerKind::min_max, two, both), two).column("v").numbers ==
          std::vector<double>{0, 1});
    CHECK(apply_scaler(fit_scaler(ScalerKind::none, t, all), t) == t);

    // Parameters come from the training rows only.
    const std::vector<std::size_t> first{0, 1};
    const auto mm = fit_scaler(ScalerKind::min_max, t, first);
    CHECK(apply_scaler(mm, t).column("v").numbers == std::vector<double>{0, 1, 2});

    CHECK(parse_scaler_kind("min-max") == ScalerKind::min_max);
    CHECK_FALSE(parse_scaler_kind("robust"));
}

TEST_CASE("synthetic generator is deterministic and biased") {
    const auto a = make_synthetic_biased({300, 4, 1.5});
    CHECK(a == make_synthetic_biased({300, 4, 1.5}));
    CHECK(a.rows() == 300);
    const auto b = bind_schema(a, support::synthetic_schema());
    double pm = 0, nm = 0, pf = 0, nf = 0;
    for (std::size_t i = 0; i < b.rows(); ++i) {
        (b.privileged[i] ? pm : pf) += b.labels[i];
        (b.privileged[i] ? nm : nf) += 1;
    }
    CHECK(pm / nm > pf / nf);
}
