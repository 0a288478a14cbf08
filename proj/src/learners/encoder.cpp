#include <algorithm>
#include <set>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"

namespace fairbench::learners {

std::size_t Encoder::width() const noexcept {
    std::size_t w = 0;
    for (const auto& c : columns) w += c.type == data::ColumnType::numeric ? 1 : c.levels.size();
    return w;
}

Encoder fit_encoder(const data::DataTable& table) {
    Encoder enc;
    for (const auto& col : table.columns()) {
        EncodedColumn ec;
        ec.name = col.name;
        ec.type = col.type;
        if (col.type == data::ColumnType::categorical) {
            std::set<std::string> levels(col.labels.begin(), col.labels.end());
            ec.levels.assign(levels.begin(), levels.end());
        }
        enc.columns.push_back(std::move(ec));
    }
    return enc;
}

Matrix Encoder::transform(const data::DataTable& table, std::size_t* unseen) const {
    Matrix m(table.rows(), width());
    std::size_t offset = 0;
    std::size_t misses = 0;
    for (const auto& ec : columns) {
        const data::Column& col = table.column(ec.name);
        if (ec.type == data::ColumnType::numeric) {
            if (col.type != data::ColumnType::numeric) {
                throw InvalidArgument("column '" + ec.name + "' was numeric when the model was fitted");
            }
            for (std::size_t r = 0; r < table.rows(); ++r) m(r, offset) = col.numbers[r];
            offset += 1;
            continue;
        }
        for (std::size_t r = 0; r < table.rows(); ++r) {
            const std::string cell = col.cell_text(r);
            const auto it = std::lower_bound(ec.levels.begin(), ec.levels.end(), cell);
            if (it != ec.levels.end() && *it == cell) {
                m(r, offset + static_cast<std::size_t>(it - ec.levels.begin())) = 1.0;
            } else {
                ++misses;
            }
        }
        offset += ec.levels.size();
    }
    if (unseen) *unseen = misses;
    return m;
}

}  // namespace fairbench::learners
