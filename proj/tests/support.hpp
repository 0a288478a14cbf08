#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fairbench/data.hpp"
#include "fairbench/rng.hpp"

namespace support {

using fairbench::data::BoundDataset;
using fairbench::data::Column;
using fairbench::data::DataTable;
using fairbench::data::DatasetSchema;

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

inline bool near_rel(double a, double b, double rel, double abs_floor = 1e-300) {
    return std::fabs(a - b) <= rel * std::max({std::fabs(a), std::fabs(b), abs_floor});
}

/// One numeric feature x, sensitive column "s" (privileged "p"), label y in {"1","0"}.
inline BoundDataset make_bound(const std::vector<double>& x, const std::vector<std::string>& s,
                               const std::vector<std::string>& y) {
    DataTable t({Column::numeric("x", x), Column::categorical("s", s), Column::categorical("y", y)});
    DatasetSchema schema;
    schema.label_column = "y";
    schema.positive_value = "1";
    schema.sensitive = {{"s", {"p"}}};
    return fairbench::data::bind_schema(t, schema);
}

/// The 8-row skew table: priv/pos 3, priv/neg 1, unpriv/pos 1, unpriv/neg 3.
inline BoundDataset skew_fixture() {
    return make_bound({1, 2, 3, 4, 5, 6, 7, 8}, {"p", "p", "p", "p", "u", "u", "u", "u"},
                      {"1", "1", "1", "0", "1", "0", "0", "0"});
}

inline DatasetSchema synthetic_schema() {
    DatasetSchema schema;
    schema.label_column = "label";
    schema.positive_value = "good";
    schema.sensitive = {{"sex", {"M"}}};
    return schema;
}

/// Sensitive columns sex (M) and race (W), label y skewed toward both
/// privileged values; rows 0 and 1 guarantee both labels.
inline BoundDataset two_sensitive(fairbench::Rng& rng, std::size_t n, double skew) {
    std::vector<std::string> sex(n), race(n), city(n), y(n);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        sex[i] = rng.unit() < 0.5 ? "M" : "F";
        race[i] = rng.unit() < 0.6 ? "W" : "B";
        const double p = 0.5 + (sex[i] == "M" ? skew : -skew) + (race[i] == "W" ? skew / 2 : -skew / 2);
        y[i] = rng.unit() < std::clamp(p, 0.05, 0.95) ? "1" : "0";
        x[i] = rng.uniform(0, 10);
        city[i] = rng.unit() < 0.5 ? "n" : "s";
    }
    y[0] = "1";
    y[1] = "0";
    DataTable t({Column::categorical("sex", sex), Column::categorical("race", race), Column::numeric("x", x),
                 Column::categorical("city", city), Column::categorical("y", y)});
    fairbench::data::DatasetSchema s;
    s.label_column = "y";
    s.positive_value = "1";
    s.sensitive = {{"sex", {"M"}}, {"race", {"W"}}};
    return fairbench::data::bind_schema(t, s);
}

// Ratios recomputed from the raw sensitive cells and labels.
inline std::map<std::pair<std::string, double>, double> recount(const BoundDataset& d) {
    const double n = static_cast<double>(d.rows());
    std::map<std::string, double> combo;
    std::map<double, double> label;
    std::map<std::pair<std::string, double>, double> joint;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        std::string key;
        for (const auto& s : d.schema.sensitive) key += d.features.column(s.column).cell_text(i) + "|";
        combo[key] += 1;
        label[d.labels[i]] += 1;
        joint[{key, d.labels[i]}] += 1;
    }
    std::map<std::pair<std::string, double>, double> ratio;
    for (const auto& [g, c] : joint) ratio[g] = (combo[g.first] / n) * (label[g.second] / n) / (c / n);
    return ratio;
}

inline BoundDataset synthetic_bound(std::size_t rows, std::uint64_t seed, double bias = 1.0) {
    return fairbench::data::bind_schema(fairbench::data::make_synthetic_biased({rows, seed, bias}),
                                        synthetic_schema());
}

// Midranks by counting, H with tie correction, written without sorting.
inline double oracle_h(const std::vector<std::vector<double>>& groups) {
    std::vector<double> all;
    for (const auto& g : groups) all.insert(all.end(), g.begin(), g.end());
    const double n = static_cast<double>(all.size());
    auto midrank = [&](double v) {
        double less = 0, equal = 0;
        for (double u : all) {
            less += u < v;
            equal += u == v;
        }
        return less + (equal + 1) / 2;
    };
    double s = 0;
    for (const auto& g : groups) {
        double r = 0;
        for (double v : g) r += midrank(v);
        const double mean = r / static_cast<double>(g.size());
        s += static_cast<double>(g.size()) * (mean - (n + 1) / 2) * (mean - (n + 1) / 2);
    }
    double ties = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
        bool first = true;
        for (std::size_t j = 0; j < i; ++j) first = first && all[j] != all[i];
        if (!first) continue;
        const double t = static_cast<double>(std::count(all.begin(), all.end(), all[i]));
        ties += t * t * t - t;
    }
    const double correction = 1 - ties / (n * n * n - n);
    return 12.0 / (n * (n + 1)) * s / correction;
}

}  // namespace support
