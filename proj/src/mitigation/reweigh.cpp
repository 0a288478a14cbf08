#include "fairbench/error.hpp"
#include "fairbench/mitigation.hpp"

namespace fairbench::mitigation {

std::vector<double> reweigh(const data::BoundDataset& train) {
    if (train.schema.task != data::Task::classification) {
        throw InvalidArgument("reweighing needs a classification task");
    }
    const std::size_t n = train.rows();
    double count_s[2] = {0, 0};
    double count_y[2] = {0, 0};
    double count_sy[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) {
        const int s = train.privileged[i] ? 1 : 0;
        const int y = train.labels[i] == 1.0 ? 1 : 0;
        count_s[s] += 1;
        count_y[y] += 1;
        count_sy[s][y] += 1;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = train.privileged[i] ? 1 : 0;
        const int y = train.labels[i] == 1.0 ? 1 : 0;
        w[i] = (count_s[s] * count_y[y]) / (static_cast<double>(n) * count_sy[s][y]);
    }
    return w;
}

}  // namespace fairbench::mitigation
