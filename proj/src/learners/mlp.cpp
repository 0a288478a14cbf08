#include <cmath>

#include "fairbench/kernels.hpp"
#include "fairbench/learners.hpp"
#include "fairbench/rng.hpp"

namespace fairbench::learners::mlp {

namespace {

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Hidden activations into `h`; returns the output pre-activation.
double hidden_pass(const MlpParams& p, std::span<const double> row, std::vector<double>& h) {
    const std::size_t d = row.size();
    for (std::size_t k = 0; k < p.hidden; ++k) {
        const double a = kernels::dot(std::span<const double>(p.w1.data() + k * d, d), row) + p.b1[k];
        h[k] = a > 0 ? a : 0.0;
    }
    return kernels::dot(p.w2, h) + p.b2;
}

}  // namespace

double forward(const MlpParams& p, std::span<const double> row) {
    std::vector<double> h(p.hidden);
    return sigmoid(hidden_pass(p, row, h));
}

MlpParams train(const Hyperparameters& hp, std::uint64_t seed, const Matrix& x, std::span<const double> y,
                std::vector<double>* loss_history) {
    const std::size_t d = x.cols;
    MlpParams p;
    p.hidden = hp.hidden_units;
    p.threshold = hp.threshold;
    Rng rng(seed);
    p.w1.resize(p.hidden * d);
    for (double& v : p.w1) v = rng.uniform(-0.5, 0.5);
    p.b1.assign(p.hidden, 0.0);
    p.w2.resize(p.hidden);
    for (double& v : p.w2) v = rng.uniform(-0.5, 0.5);

    const double inv_n = 1.0 / static_cast<double>(x.rows);
    std::vector<double> h(p.hidden);
    std::vector<double> g_w1(p.w1.size());
    std::vector<double> g_b1(p.hidden);
    std::vector<double> g_w2(p.hidden);

    for (std::size_t epoch = 0; epoch < hp.epochs; ++epoch) {
        std::fill(g_w1.begin(), g_w1.end(), 0.0);
        std::fill(g_b1.begin(), g_b1.end(), 0.0);
        std::fill(g_w2.begin(), g_w2.end(), 0.0);
        double g_b2 = 0.0;
        double loss = 0.0;
        for (std::size_t i = 0; i < x.rows; ++i) {
            const auto row = x.row(i);
            const double z = hidden_pass(p, row, h);
            loss += softplus(z) - y[i] * z;
            const double delta = sigmoid(z) - y[i];
            kernels::axpy(delta, h, g_w2);
            g_b2 += delta;
            for (std::size_t k = 0; k < p.hidden; ++k) {
                if (h[k] <= 0.0) continue;
                const double dk = delta * p.w2[k];
                kernels::axpy(dk, row, std::span<double>(g_w1.data() + k * d, d));
                g_b1[k] += dk;
            }
        }
        if (loss_history) loss_history->push_back(loss * inv_n);
        const double step = -hp.mlp_learning_rate * inv_n;
        kernels::axpy(step, g_w1, p.w1);
        kernels::axpy(step, g_b1, p.b1);
        kernels::axpy(step, g_w2, p.w2);
        p.b2 += step * g_b2;
    }
    return p;
}

}  // namespace fairbench::learners::mlp
