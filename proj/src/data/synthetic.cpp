#include <algorithm>
#include <cmath>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::data {

namespace {

// Box-Muller from two unit draws, so output does not depend on the standard
// library's normal_distribution.
double normal(Rng& rng) {
    const double u1 = 1.0 - rng.unit();
    const double u2 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double round_to(double v, double inverse_step) { return std::round(v * inverse_step) / inverse_step; }

}  // namespace

DataTable make_synthetic_biased(const SyntheticOptions& options) {
    if (options.rows < 2) throw InvalidArgument("synthetic table needs at least two rows");
    Rng rng(options.seed);
    const std::size_t n = options.rows;
    static constexpr const char* kRaces[] = {"W", "B", "A"};
    static constexpr const char* kCities[] = {"north", "south", "east", "west"};

    std::vector<std::string> sex(n), race(n), city(n), label(n);
    std::vector<double> age(n), income(n), debt(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool male = rng.unit() < 0.5;
        sex[i] = male ? "M" : "F";
        const double r = rng.unit();
        race[i] = kRaces[r < 0.6 ? 0 : (r < 0.85 ? 1 : 2)];
        city[i] = kCities[rng.index(4)];
        age[i] = std::round(std::clamp(40.0 + 12.0 * normal(rng), 18.0, 80.0));
        // The privileged group also earns more, so the bias leaks through a proxy feature.
        income[i] = round_to(std::max(5.0, 50.0 + 15.0 * normal(rng) + (male ? 5.0 : -5.0) * options.bias_strength),
                             100.0);
        debt[i] = round_to(std::max(0.0, 20.0 + 8.0 * normal(rng)), 100.0);

        const double z = 0.06 * (income[i] - 50.0) - 0.08 * (debt[i] - 20.0) + 0.01 * (age[i] - 40.0) +
                         (male ? options.bias_strength : -options.bias_strength);
        const double p = 1.0 / (1.0 + std::exp(-z));
        label[i] = rng.unit() < p ? "good" : "bad";
    }
    // Both label values must be present for a usable benchmark.
    if (std::all_of(label.begin(), label.end(), [&](const std::string& s) { return s == label[0]; })) {
        label[0] = label[0] == "good" ? "bad" : "good";
    }
    return DataTable({Column::categorical("sex", std::move(sex)), Column::categorical("race", std::move(race)),
                      Column::numeric("age", std::move(age)), Column::numeric("income", std::move(income)),
                      Column::numeric("debt", std::move(debt)), Column::categorical("city", std::move(city)),
                      Column::categorical("label", std::move(label))});
}

}  // namespace fairbench::data
