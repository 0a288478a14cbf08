#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "fairbench/data.hpp"
#include "fairbench/error.hpp"
#include "fairbench/text.hpp"

namespace fairbench::data {

std::string_view to_string(Task t) noexcept {
    return t == Task::classification ? "classification" : "regression";
}

bool Column::is_missing(std::size_t row) const {
    return type == ColumnType::numeric ? std::isnan(numbers[row]) : labels[row].empty();
}

std::string Column::cell_text(std::size_t row) const {
    if (type == ColumnType::categorical) return labels[row];
    return std::isnan(numbers[row]) ? std::string() : text::shortest(numbers[row]);
}

bool Column::cell_equals(std::size_t row, std::string_view value) const {
    if (type == ColumnType::categorical) return labels[row] == value;
    if (auto v = text::parse_number(value)) return numbers[row] == *v;
    return false;
}

Column Column::numeric(std::string name, std::vector<double> values) {
    Column c;
    c.name = std::move(name);
    c.type = ColumnType::numeric;
    c.numbers = std::move(values);
    return c;
}

Column Column::categorical(std::string name, std::vector<std::string> values) {
    Column c;
    c.name = std::move(name);
    c.type = ColumnType::categorical;
    c.labels = std::move(values);
    return c;
}

DataTable::DataTable(std::vector<Column> columns) : columns_(std::move(columns)) {
    std::set<std::string> names;
    for (const auto& c : columns_) {
        if (!names.insert(c.name).second) throw InvalidArgument("duplicate column name '" + c.name + "'");
    }
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    for (const auto& c : columns_) {
        if (c.size() != rows_) {
            throw InvalidArgument("column '" + c.name + "' has " + std::to_string(c.size()) + " rows, expected " +
                                  std::to_string(rows_));
        }
    }
}

std::vector<std::string> DataTable::column_names() const {
    std::vector<std::string> out;
    for (const auto& c : columns_) out.push_back(c.name);
    return out;
}

std::optional<std::size_t> DataTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    return std::nullopt;
}

const Column& DataTable::column(std::string_view name) const {
    if (auto i = find(name)) return columns_[*i];
    throw UnknownReferenceError("column", std::string(name));
}

DataTable DataTable::select_rows(std::span<const std::size_t> rows) const {
    std::vector<Column> out;
    out.reserve(columns_.size());
    for (const auto& c : columns_) {
        Column n;
        n.name = c.name;
        n.type = c.type;
        if (c.type == ColumnType::numeric) {
            n.numbers.reserve(rows.size());
            for (std::size_t r : rows) n.numbers.push_back(c.numbers.at(r));
        } else {
            n.labels.reserve(rows.size());
            for (std::size_t r : rows) n.labels.push_back(c.labels.at(r));
        }
        out.push_back(std::move(n));
    }
    DataTable t;
    t.columns_ = std::move(out);
    t.rows_ = rows.size();
    return t;
}

DataTable DataTable::without(std::string_view name) const {
    std::vector<Column> out;
    for (const auto& c : columns_) {
        if (c.name != name) out.push_back(c);
    }
    DataTable t;
    t.columns_ = std::move(out);
    t.rows_ = rows_;
    return t;
}

DataTable DataTable::replace_column(Column column) const {
    const auto idx = find(column.name);
    if (!idx) throw UnknownReferenceError("column", column.name);
    if (column.size() != rows_) throw InvalidArgument("replacement column '" + column.name + "' has wrong length");
    DataTable t(*this);
    t.columns_[*idx] = std::move(column);
    return t;
}

namespace {

// Splits CSV text into records of raw fields. Quoted fields may span lines.
std::vector<std::vector<std::string>> tokenize(std::string_view text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started && field.empty()) {
            in_quotes = true;
            field_started = true;
        } else if (c == ',') {
            end_field();
        } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        } else if (c == '\n') {
            end_record();
            ++line;
        } else {
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw ParseError("unterminated quoted field at line " + std::to_string(line));
    if (field_started || !field.empty() || !record.empty()) end_record();
    return records;
}

std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace

DataTable parse_csv(std::string_view text) {
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF) {
        text.remove_prefix(3);
    }
    const auto records = tokenize(text);
    if (records.empty()) throw ParseError("CSV input is empty");

    const auto& header = records.front();
    std::set<std::string> seen;
    for (const auto& name : header) {
        if (!seen.insert(name).second) throw ParseError("duplicate CSV header '" + name + "'");
    }
    const std::size_t cols = header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != cols) {
            throw ParseError("ragged CSV row " + std::to_string(r + 1) + ": " + std::to_string(records[r].size()) +
                             " fields, expected " + std::to_string(cols));
        }
    }

    std::vector<Column> columns;
    columns.reserve(cols);
    const std::size_t rows = records.size() - 1;
    for (std::size_t c = 0; c < cols; ++c) {
        std::vector<double> numbers(rows);
        bool numeric = true;
        for (std::size_t r = 0; r < rows && numeric; ++r) {
            const std::string& cell = records[r + 1][c];
            if (text::trim(cell).empty()) {
                numbers[r] = std::numeric_limits<double>::quiet_NaN();
            } else if (auto v = text::parse_number(cell)) {
                numbers[r] = *v;
            } else {
                numeric = false;
            }
        }
        if (numeric) {
            columns.push_back(Column::numeric(header[c], std::move(numbers)));
        } else {
            std::vector<std::string> labels(rows);
            for (std::size_t r = 0; r < rows; ++r) labels[r] = records[r + 1][c];
            columns.push_back(Column::categorical(header[c], std::move(labels)));
        }
    }
    return DataTable(std::move(columns));
}

std::string to_csv(const DataTable& table) {
    std::string out;
    const auto& cols = table.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(cols[c].name);
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            out += quote_if_needed(cols[c].cell_text(r));
        }
        out += '\n';
    }
    return out;
}

}  // namespace fairbench::data
