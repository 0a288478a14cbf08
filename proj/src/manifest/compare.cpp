#include "fairbench/error.hpp"
#include "fairbench/manifest.hpp"
#include "fairbench/metrics.hpp"
#include "fairbench/text.hpp"

namespace fairbench::manifest {

namespace {

bool comparable(const std::string& name) {
    return name == "score" || (name.size() > 5 && name.compare(name.size() - 5, 5, "_mean") == 0);
}

std::vector<double> column_values(const data::DataTable& t, const std::string& name) {
    const auto& col = t.column(name);
    std::vector<double> out;
    for (std::size_t r = 0; r < t.rows(); ++r) {
        if (col.type == data::ColumnType::numeric) {
            if (!col.is_missing(r)) out.push_back(col.numbers[r]);
        } else if (auto v = text::parse_number(col.labels[r])) {
            out.push_back(*v);
        }
    }
    return out;
}

}  // namespace

std::vector<ComparisonRow> compare_reports(std::string_view report_a, std::string_view report_b, double alpha) {
    const data::DataTable a = data::parse_csv(report_a);
    const data::DataTable b = data::parse_csv(report_b);
    if (a.rows() < 2 || b.rows() < 2) throw InvalidArgument("each report needs at least two rows to compare");

    std::vector<ComparisonRow> out;
    for (const auto& name : a.column_names()) {
        if (!comparable(name) || !b.find(name)) continue;
        auto xa = column_values(a, name);
        auto xb = column_values(b, name);
        ComparisonRow row;
        row.column = name;
        if (xa.empty() || xb.empty() || xa.size() + xb.size() < 3) {
            row.h = 0.0;
            row.p = 1.0;
        } else {
            const auto kw = metrics::kruskal_wallis({xa, xb});
            row.h = kw.h;
            row.p = kw.p;
        }
        row.significant = row.p < alpha;
        out.push_back(row);
    }
    bool shared_metric = false;
    for (const auto& r : out) shared_metric = shared_metric || r.column != "score";
    if (!shared_metric) throw InvalidArgument("the reports share no metric columns");
    return out;
}

std::string format_comparison(const std::vector<ComparisonRow>& rows) {
    std::string out = "column,H,p,significant\n";
    for (const auto& r : rows) {
        out += r.column + "," + text::fixed6(r.h) + "," + text::fixed6(r.p) + "," + (r.significant ? "yes" : "no") + "\n";
    }
    return out;
}

}  // namespace fairbench::manifest
