#include <algorithm>
#include <cmath>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/kernels.hpp"

namespace fairbench::data {

std::string_view to_string(ScalerKind k) noexcept {
    switch (k) {
        case ScalerKind::none: return "none";
        case ScalerKind::standard: return "standard";
        case ScalerKind::min_max: return "min-max";
    }
    return "none";
}

std::optional<ScalerKind> parse_scaler_kind(std::string_view s) noexcept {
    for (ScalerKind k : {ScalerKind::none, ScalerKind::standard, ScalerKind::min_max}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

Scaler fit_scaler(ScalerKind kind, const DataTable& table, std::span<const std::size_t> training_rows) {
    Scaler s;
    s.kind = kind;
    if (kind == ScalerKind::none) return s;
    if (training_rows.empty()) throw InvalidArgument("cannot fit a scaler on zero rows");

    std::vector<double> values(training_rows.size());
    for (const auto& col : table.columns()) {
        if (col.type != ColumnType::numeric) continue;
        for (std::size_t i = 0; i < training_rows.size(); ++i) values[i] = col.numbers.at(training_rows[i]);

        ColumnScaling cs;
        cs.column = col.name;
        if (kind == ScalerKind::standard) {
            const double n = static_cast<double>(values.size());
            const double mean = kernels::sum(values) / n;
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            cs.center = mean;
            cs.spread = std::sqrt(ss / n);
        } else {
            const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
            cs.center = *lo;
            cs.spread = *hi - *lo;
        }
        s.columns.push_back(std::move(cs));
    }
    return s;
}

DataTable apply_scaler(const Scaler& scaler, const DataTable& table) {
    if (scaler.kind == ScalerKind::none) return table;
    DataTable out = table;
    for (const auto& cs : scaler.columns) {
        const auto idx = table.find(cs.column);
        if (!idx || table.columns()[*idx].type != ColumnType::numeric) continue;
        Column col = table.columns()[*idx];
        for (double& v : col.numbers) v = cs.spread == 0.0 ? 0.0 : (v - cs.center) / cs.spread;
        out = out.replace_column(std::move(col));
    }
    return out;
}

}  // namespace fairbench::data
