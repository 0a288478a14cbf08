#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairbench/learners.hpp"

namespace fairbench::learners::tree {

namespace {

struct Stats {
    double w = 0.0;
    double wy = 0.0;
    double wy2 = 0.0;

    void add(double weight, double y) {
        w += weight;
        wy += weight * y;
        wy2 += weight * y * y;
    }
    Stats minus(const Stats& o) const { return {w - o.w, wy - o.wy, wy2 - o.wy2}; }
};

// Impurity scaled by the node weight: gini * W or variance * W.
double impurity(const Stats& s, data::Task task) {
    if (s.w <= 0.0) return 0.0;
    if (task == data::Task::classification) {
        const double neg = s.w - s.wy;
        return std::max(0.0, 2.0 * s.wy * neg / s.w);
    }
    return std::max(0.0, s.wy2 - s.wy * s.wy / s.w);
}

bool close_or_less(double a, double b) { return a <= b + 1e-12 * std::max(1.0, std::fabs(b)); }
bool clearly_less(double a, double b) { return a < b - 1e-12 * std::max(1.0, std::fabs(b)); }

class Builder {
public:
    Builder(const Hyperparameters& hp, const Matrix& x, std::span<const double> y, std::span<const double> w,
            data::Task task)
        : hp_(hp), x_(x), y_(y), w_(w), task_(task) {}

    TreeParams run() {
        std::vector<std::size_t> rows(x_.rows);
        std::iota(rows.begin(), rows.end(), 0);
        build(rows, 0);
        return std::move(out_);
    }

private:
    std::int64_t build(std::vector<std::size_t>& rows, std::size_t depth) {
        Stats s;
        for (std::size_t r : rows) s.add(w_[r], y_[r]);
        const auto id = static_cast<std::int64_t>(out_.nodes.size());
        out_.nodes.push_back(TreeNode{});
        out_.nodes[id].value = leaf_value(rows, s);

        const double node_impurity = impurity(s, task_);
        if (depth >= hp_.max_depth || node_impurity <= 1e-12 * std::max(1.0, s.w)) return id;

        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        double best_cost = 0.0;
        bool found = false;
        std::vector<std::size_t> order = rows;
        for (std::size_t j = 0; j < x_.cols; ++j) {
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return x_(a, j) < x_(b, j); });
            Stats left;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                left.add(w_[order[k]], y_[order[k]]);
                const double lo = x_(order[k], j);
                const double hi = x_(order[k + 1], j);
                if (!(lo < hi)) continue;
                const Stats right = s.minus(left);
                if (left.w < hp_.min_leaf_weight || right.w < hp_.min_leaf_weight) continue;
                const double cost = impurity(left, task_) + impurity(right, task_);
                if (!found || clearly_less(cost, best_cost)) {
                    double t = lo + (hi - lo) / 2.0;
                    if (!(t < hi)) t = lo;
                    found = true;
                    best_cost = cost;
                    best_feature = j;
                    best_threshold = t;
                }
            }
        }
        // Zero-gain splits on impure nodes are allowed; parity-style targets
        // need them to become separable one level down.
        if (!found || !close_or_less(best_cost, node_impurity)) return id;

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (std::size_t r : rows) (x_(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        out_.nodes[id].feature = static_cast<std::int64_t>(best_feature);
        out_.nodes[id].threshold = best_threshold;
        const auto l = build(left_rows, depth + 1);
        const auto r = build(right_rows, depth + 1);
        out_.nodes[id].left = l;
        out_.nodes[id].right = r;
        return id;
    }

    double leaf_value(const std::vector<std::size_t>& rows, const Stats& s) const {
        if (s.w > 0.0) return s.wy / s.w;
        if (rows.empty()) return 0.0;
        double acc = 0.0;
        for (std::size_t r : rows) acc += y_[r];
        return acc / static_cast<double>(rows.size());
    }

    const Hyperparameters& hp_;
    const Matrix& x_;
    std::span<const double> y_;
    std::span<const double> w_;
    data::Task task_;
    TreeParams out_;
};

}  // namespace

TreeParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y, std::span<const double> w,
                 data::Task task) {
    return Builder(hp, x, y, w, task).run();
}

double evaluate(const TreeParams& t, std::span<const double> row) {
    std::int64_t i = 0;
    while (t.nodes[i].feature >= 0) {
        const auto& n = t.nodes[i];
        i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return t.nodes[i].value;
}

std::vector<double> node_impurities(const TreeParams& t, const Matrix& x, std::span<const double> y,
                                    std::span<const double> w, data::Task task) {
    std::vector<Stats> stats(t.nodes.size());
    for (std::size_t r = 0; r < x.rows; ++r) {
        std::int64_t i = 0;
        while (true) {
            stats[i].add(w[r], y[r]);
            const auto& n = t.nodes[i];
            if (n.feature < 0) break;
            i = x(r, static_cast<std::size_t>(n.feature)) <= n.threshold ? n.left : n.right;
        }
    }
    std::vector<double> out;
    out.reserve(stats.size());
    for (const auto& s : stats) out.push_back(impurity(s, task));
    return out;
}

}  // namespace fairbench::learners::tree
