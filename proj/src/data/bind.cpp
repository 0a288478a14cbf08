#include <map>
#include <string>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/text.hpp"

namespace fairbench::data {

std::vector<SensitiveFeature> parse_sensitive_features(std::string_view spec) {
    std::vector<SensitiveFeature> out;
    if (text::trim(spec).empty()) return out;
    for (const auto& part : text::split(spec, ';')) {
        const std::string_view item = text::trim(part);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("sensitive feature '" + std::string(item) + "' must look like column=value1|value2");
        }
        SensitiveFeature f;
        f.column = std::string(text::trim(item.substr(0, eq)));
        for (const auto& v : text::split(item.substr(eq + 1), '|')) {
            const auto value = text::trim(v);
            if (!value.empty()) f.privileged.emplace_back(value);
        }
        if (f.column.empty() || f.privileged.empty()) {
            throw ParseError("sensitive feature '" + std::string(item) + "' needs a column and privileged values");
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::string format_sensitive_features(const std::vector<SensitiveFeature>& features) {
    std::vector<std::string> parts;
    for (const auto& f : features) parts.push_back(f.column + "=" + text::join(f.privileged, "|"));
    return text::join(parts, ";");
}

BoundDataset bind_schema(const DataTable& table, const DatasetSchema& schema) {
    const Column& label = table.column(schema.label_column);
    for (const auto& s : schema.sensitive) {
        if (s.column == schema.label_column) {
            throw InvalidArgument("label column '" + s.column + "' cannot also be a sensitive feature");
        }
        table.column(s.column);
    }
    for (const auto& col : table.columns()) {
        for (std::size_t r = 0; r < table.rows(); ++r) {
            if (col.is_missing(r)) {
                throw InvalidArgument("missing value at data row " + std::to_string(r + 1) + ", column '" +
                                      col.name + "'");
            }
        }
    }

    BoundDataset b;
    b.schema = schema;
    b.features = table.without(schema.label_column);
    const std::size_t n = table.rows();
    b.labels.resize(n);

    if (schema.task == Task::classification) {
        if (!schema.positive_value) throw InvalidArgument("classification schema needs a positive label value");
        std::size_t positives = 0;
        for (std::size_t r = 0; r < n; ++r) {
            const bool pos = label.cell_equals(r, *schema.positive_value);
            b.labels[r] = pos ? 1.0 : 0.0;
            positives += pos ? 1 : 0;
        }
        if (positives == 0) {
            throw InvalidArgument("positive label value '" + *schema.positive_value + "' does not occur in column '" +
                                  schema.label_column + "'");
        }
    } else {
        if (label.type != ColumnType::numeric) {
            throw InvalidArgument("regression label column '" + schema.label_column + "' must be numeric");
        }
        b.labels = label.numbers;
    }

    b.privileged.assign(n, 1);
    std::vector<std::vector<std::string>> combos(n);
    for (const auto& s : schema.sensitive) {
        const Column& col = table.column(s.column);
        for (std::size_t r = 0; r < n; ++r) {
            bool priv = false;
            for (const auto& v : s.privileged) priv = priv || col.cell_equals(r, v);
            if (!priv) b.privileged[r] = 0;
            combos[r].push_back(col.cell_text(r));
        }
    }
    // Ids follow the sorted order of value combinations, independent of row order.
    std::map<std::vector<std::string>, std::uint32_t> ids;
    for (const auto& c : combos) ids.emplace(c, 0);
    std::uint32_t next = 0;
    for (auto& [combo, id] : ids) id = next++;
    b.subgroup.resize(n);
    for (std::size_t r = 0; r < n; ++r) b.subgroup[r] = ids.at(combos[r]);
    return b;
}

BoundDataset BoundDataset::subset(std::span<const std::size_t> rows) const {
    BoundDataset out;
    out.schema = schema;
    out.features = features.select_rows(rows);
    out.labels.reserve(rows.size());
    out.privileged.reserve(rows.size());
    out.subgroup.reserve(rows.size());
    for (std::size_t r : rows) {
        out.labels.push_back(labels.at(r));
        out.privileged.push_back(privileged.at(r));
        out.subgroup.push_back(subgroup.at(r));
    }
    return out;
}

BoundDataset BoundDataset::with_features(DataTable replacement) const {
    if (replacement.rows() != rows()) throw InvalidArgument("replacement feature table has wrong row count");
    BoundDataset out(*this);
    out.features = std::move(replacement);
    return out;
}

}  // namespace fairbench::data
