#pragma once

// Tabular data: CSV ingestion, schema binding with the privileged-group mask,
// fold planning and scaling.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairbench::data {

enum class Task { classification, regression };

std::string_view to_string(Task t) noexcept;

enum class ColumnType { numeric, categorical };

/// One typed column. Numeric columns hold values in `numbers` (NaN marks an
/// empty cell); categorical columns hold text in `labels` ("" marks empty).
struct Column {
    std::string name;
    ColumnType type = ColumnType::numeric;
    std::vector<double> numbers;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return type == ColumnType::numeric ? numbers.size() : labels.size(); }
    bool is_missing(std::size_t row) const;
    /// Cell as text (numbers in shortest round-trip form, empty when missing).
    std::string cell_text(std::size_t row) const;
    /// Does the cell equal `value`? Numeric columns compare numerically when `value` parses.
    bool cell_equals(std::size_t row, std::string_view value) const;

    static Column numeric(std::string name, std::vector<double> values);
    static Column categorical(std::string name, std::vector<std::string> values);

    /// Element-wise; missing numeric cells (NaN) never compare equal.
    bool operator==(const Column&) const = default;
};

class DataTable {
public:
    DataTable() = default;
    /// Throws InvalidArgument on unequal lengths or duplicate names.
    explicit DataTable(std::vector<Column> columns);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<Column>& columns() const noexcept { return columns_; }
    std::vector<std::string> column_names() const;

    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws UnknownReferenceError("column", name).
    const Column& column(std::string_view name) const;

    /// Rows in the given order; indices may repeat.
    DataTable select_rows(std::span<const std::size_t> rows) const;
    DataTable without(std::string_view name) const;
    DataTable replace_column(Column column) const;

    bool operator==(const DataTable&) const = default;

private:
    std::vector<Column> columns_;
    std::size_t rows_ = 0;
};

/// Comma-separated, `\n` or `\r\n` rows, optional double quotes with `""`
/// escapes, header on the first row. A column is numeric iff every non-empty
/// cell parses as a decimal number.
DataTable parse_csv(std::string_view text);
std::string to_csv(const DataTable& table);

struct SensitiveFeature {
    std::string column;
    std::vector<std::string> privileged;
};

struct DatasetSchema {
    std::string label_column;
    std::optional<std::string> positive_value;  // classification only
    Task task = Task::classification;
    std::vector<SensitiveFeature> sensitive;
};

/// Parses "sex=Male;race=White|Asian".
std::vector<SensitiveFeature> parse_sensitive_features(std::string_view spec);
std::string format_sensitive_features(const std::vector<SensitiveFeature>& features);

/// A table split into features and label with per-row group information.
struct BoundDataset {
    DataTable features;                  ///< every column except the label
    std::vector<double> labels;          ///< 1/0 (positive/negative) or regression targets
    std::vector<std::uint8_t> privileged;  ///< conjunction over sensitive features
    std::vector<std::uint32_t> subgroup;   ///< intersectional sensitive-value combination id
    DatasetSchema schema;

    std::size_t rows() const noexcept { return labels.size(); }
    BoundDataset subset(std::span<const std::size_t> rows) const;
    BoundDataset with_features(DataTable features) const;
};

BoundDataset bind_schema(const DataTable& table, const DatasetSchema& schema);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

struct FoldPlan {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> assignment;  ///< fold index per row
    bool stratified = false;
    bool stratification_downgraded = false;

    Split split(std::size_t fold) const;
    std::vector<std::size_t> fold_sizes() const;
};

/// Throws InvalidArgument unless 2 <= k <= rows. Stratification falls back to
/// a plain shuffle (flagged) when a class has fewer than k members.
FoldPlan make_folds(const BoundDataset& bound, std::size_t k, std::uint64_t seed, bool stratified);

/// Single train/test split with round(rows * test_fraction) test rows (at least
/// one row on each side).
Split make_holdout(const BoundDataset& bound, double test_fraction, std::uint64_t seed, bool stratified);

enum class ScalerKind { none, standard, min_max };

std::string_view to_string(ScalerKind k) noexcept;
std::optional<ScalerKind> parse_scaler_kind(std::string_view s) noexcept;

struct ColumnScaling {
    std::string column;
    double center = 0.0;
    double spread = 1.0;  ///< 0 marks a degenerate column, mapped to 0
};

struct Scaler {
    ScalerKind kind = ScalerKind::none;
    std::vector<ColumnScaling> columns;
};

/// Fits per-numeric-column parameters on `training_rows` only.
Scaler fit_scaler(ScalerKind kind, const DataTable& table, std::span<const std::size_t> training_rows);
/// Categorical and unknown columns pass through untouched.
DataTable apply_scaler(const Scaler& scaler, const DataTable& table);

struct SyntheticOptions {
    std::size_t rows = 200;
    std::uint64_t seed = 0;
    double bias_strength = 1.0;
};

/// Synthetic credit-style table with a binary label whose log-odds shift by
/// +/- bias_strength with the sensitive "sex" column (privileged value "M").
/// Columns: sex, race, age, income, debt, city, label.
DataTable make_synthetic_biased(const SyntheticOptions& options);

}  // namespace fairbench::data
