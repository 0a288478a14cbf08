#include <cmath>

#include "fairbench/kernels.hpp"
#include "fairbench/learners.hpp"

namespace fairbench::learners::logistic {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double total(std::span<const double> w) { return kernels::sum(w); }

}  // namespace

double loss(const LogisticParams& p, const Matrix& x, std::span<const double> y, std::span<const double> w,
            double l2) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double z = kernels::dot(x.row(i), p.weights) + p.bias;
        acc += w[i] * (softplus(z) - y[i] * z);
    }
    const double reg = 0.5 * l2 * kernels::dot(p.weights, p.weights);
    return acc / total(w) + reg;
}

std::vector<double> gradient(const LogisticParams& p, const Matrix& x, std::span<const double> y,
                             std::span<const double> w, double l2) {
    const std::size_t d = x.cols;
    std::vector<double> g(d + 1, 0.0);
    std::span<double> gw(g.data(), d);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const double z = kernels::dot(x.row(i), p.weights) + p.bias;
        const double r = w[i] * (sigmoid(z) - y[i]);
        kernels::axpy(r, x.row(i), gw);
        g[d] += r;
    }
    kernels::scale(1.0 / total(w), g);
    kernels::axpy(l2, p.weights, gw);
    return g;
}

LogisticParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y,
                     std::span<const double> w, std::vector<double>* loss_history) {
    LogisticParams p;
    p.weights.assign(x.cols, 0.0);
    p.threshold = hp.threshold;
    for (std::size_t it = 0; it < hp.iterations; ++it) {
        if (loss_history) loss_history->push_back(loss(p, x, y, w, hp.l2));
        const auto g = gradient(p, x, y, w, hp.l2);
        kernels::axpy(-hp.learning_rate, std::span<const double>(g.data(), x.cols), p.weights);
        p.bias -= hp.learning_rate * g[x.cols];
    }
    return p;
}

}  // namespace fairbench::learners::logistic
