#include <Eigen/Dense>

#include "fairbench/learners.hpp"

namespace fairbench::learners::linear {

// Weighted least squares through the normal equations
// (A' W A + ridge I) beta = A' W y, where A is x with a trailing ones column.
LinearParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y,
                   std::span<const double> w) {
    const auto d = static_cast<Eigen::Index>(x.cols);
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d + 1);
    Eigen::VectorXd a(d + 1);
    for (std::size_t i = 0; i < x.rows; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) a[j] = x(i, static_cast<std::size_t>(j));
        a[d] = 1.0;
        gram.selfadjointView<Eigen::Lower>().rankUpdate(a, w[i]);
        rhs += (w[i] * y[i]) * a;
    }
    gram.diagonal().array() += hp.ridge;
    const Eigen::VectorXd beta = gram.selfadjointView<Eigen::Lower>().ldlt().solve(rhs);

    LinearParams p;
    p.coefficients.assign(beta.data(), beta.data() + d);
    p.intercept = beta[d];
    return p;
}

}  // namespace fairbench::learners::linear
