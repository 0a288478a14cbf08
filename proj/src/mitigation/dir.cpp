#include <algorithm>
#include <numeric>

#include "fairbench/error.hpp"
#include "fairbench/mitigation.hpp"

namespace fairbench::mitigation {

namespace {

// Empirical quantile function with the i-th smallest value (0-based) placed at
// (i + 0.5)/n and linear interpolation in between.
double quantile(const std::vector<double>& sorted, double q) {
    const double n = static_cast<double>(sorted.size());
    const double pos = q * n - 0.5;
    if (pos <= 0.0) return sorted.front();
    if (pos >= n - 1.0) return sorted.back();
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

// Quantile level (midrank - 0.5)/n of every member of one group.
std::vector<double> midrank_levels(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> level(n);
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) level[order[k]] = (midrank - 0.5) / static_cast<double>(n);
        i = j + 1;
    }
    return level;
}

}  // namespace

DirResult dir_repair(const data::BoundDataset& train, double repair_level) {
    if (!(repair_level >= 0.0 && repair_level <= 1.0)) throw InvalidArgument("repair level must be in [0, 1]");
    DirResult out{train.features, false};

    std::vector<std::size_t> members[2];
    for (std::size_t r = 0; r < train.rows(); ++r) members[train.privileged[r] ? 1 : 0].push_back(r);
    if (members[0].empty() || members[1].empty()) {
        out.passthrough = true;
        return out;
    }

    auto is_sensitive = [&](const std::string& name) {
        for (const auto& s : train.schema.sensitive) {
            if (s.column == name) return true;
        }
        return false;
    };

    for (const auto& col : train.features.columns()) {
        if (col.type != data::ColumnType::numeric || is_sensitive(col.name)) continue;
        std::vector<double> group_values[2];
        std::vector<double> sorted[2];
        for (int g = 0; g < 2; ++g) {
            for (std::size_t r : members[g]) group_values[g].push_back(col.numbers[r]);
            sorted[g] = group_values[g];
            std::sort(sorted[g].begin(), sorted[g].end());
        }
        data::Column repaired = col;
        for (int g = 0; g < 2; ++g) {
            const auto levels = midrank_levels(group_values[g]);
            for (std::size_t i = 0; i < members[g].size(); ++i) {
                const double q = levels[i];
                const double median = (quantile(sorted[0], q) + quantile(sorted[1], q)) / 2.0;
                const double x = group_values[g][i];
                repaired.numbers[members[g][i]] = (1.0 - repair_level) * x + repair_level * median;
            }
        }
        out.table = out.table.replace_column(std::move(repaired));
    }
    return out;
}

}  // namespace fairbench::mitigation
