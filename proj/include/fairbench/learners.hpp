#pragma once

// From-scratch learners with a declared sample-weight capability. Inputs are
// tables; categorical columns are one-hot encoded inside fit and the encoding
// is stored in the fitted model.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fairbench/data.hpp"

namespace fairbench::learners {

enum class LearnerKind { logistic_regression, decision_tree, mlp, linear_regression, decision_tree_regressor };

/// "logistic-regression", "decision-tree", "mlp", "linear-regression", "decision-tree-regressor".
std::string_view to_string(LearnerKind k) noexcept;
std::optional<LearnerKind> parse_learner_kind(std::string_view s) noexcept;

struct Capability {
    bool supports_sample_weight = true;
    data::Task task = data::Task::classification;
};

Capability capability(LearnerKind kind) noexcept;
/// Throws UnknownReferenceError("learner kind", name).
Capability capability(std::string_view kind);

struct Hyperparameters {
    // logistic regression
    double learning_rate = 0.1;
    std::size_t iterations = 500;
    double l2 = 0.0;
    double threshold = 0.5;
    // trees
    std::size_t max_depth = 5;
    double min_leaf_weight = 1.0;
    // mlp
    std::size_t hidden_units = 16;
    double mlp_learning_rate = 0.05;
    std::size_t epochs = 500;
    // linear regression
    double ridge = 1e-8;
};

struct LearnerSpec {
    LearnerKind kind = LearnerKind::logistic_regression;
    Hyperparameters params;
    std::uint64_t seed = 0;
};

/// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct EncodedColumn {
    std::string name;
    data::ColumnType type = data::ColumnType::numeric;
    std::vector<std::string> levels;  ///< sorted; categorical only
};

/// Column order and one-hot levels fixed at fit time.
struct Encoder {
    std::vector<EncodedColumn> columns;

    std::size_t width() const noexcept;
    /// Unseen categorical levels encode as all zeros and are counted in `unseen`.
    Matrix transform(const data::DataTable& table, std::size_t* unseen = nullptr) const;
};

Encoder fit_encoder(const data::DataTable& table);

struct ConstantParams {
    double value = 0.0;
};

struct LogisticParams {
    std::vector<double> weights;
    double bias = 0.0;
    double threshold = 0.5;
};

struct TreeNode {
    std::int64_t feature = -1;  ///< -1 marks a leaf
    double threshold = 0.0;     ///< go left iff x[feature] <= threshold
    std::int64_t left = -1;
    std::int64_t right = -1;
    double value = 0.0;  ///< leaf: positive fraction (classifier) or mean (regressor)
};

struct TreeParams {
    std::vector<TreeNode> nodes;  ///< nodes[0] is the root
};

struct MlpParams {
    std::size_t hidden = 0;
    std::vector<double> w1;  ///< hidden x inputs, row-major
    std::vector<double> b1;
    std::vector<double> w2;
    double b2 = 0.0;
    double threshold = 0.5;
};

struct LinearParams {
    std::vector<double> coefficients;
    double intercept = 0.0;
};

using Parameters = std::variant<ConstantParams, LogisticParams, TreeParams, MlpParams, LinearParams>;

struct FittedModel {
    LearnerKind kind = LearnerKind::logistic_regression;
    data::Task task = data::Task::classification;
    Encoder encoder;
    std::optional<data::Scaler> scaler;  ///< applied before encoding when present
    Parameters params;
    /// Not serialized.
    std::vector<std::string> flags;
    std::vector<double> loss_history;
};

/// Throws CapabilityError when weights are given to a learner without weight
/// support, InvalidArgument on shape or range problems. Classification
/// targets must be 0/1; a single-class target yields a flagged constant model.
FittedModel fit(const LearnerSpec& spec, const data::DataTable& features, std::span<const double> targets,
                std::optional<std::span<const double>> weights = std::nullopt);

struct Prediction {
    std::vector<double> values;
    std::size_t unseen_levels = 0;
};

Prediction predict_detailed(const FittedModel& model, const data::DataTable& features);
std::vector<double> predict(const FittedModel& model, const data::DataTable& features);

/// Raw model output on encoded rows (probability for classifiers).
std::vector<double> decision_values(const FittedModel& model, const Matrix& x);

namespace logistic {

/// Weight-normalized cross-entropy sum(w*l)/sum(w) + l2/2 * |weights|^2.
double loss(const LogisticParams& p, const Matrix& x, std::span<const double> y, std::span<const double> w,
            double l2);
/// Gradient of `loss`: d/dweights followed by d/dbias.
std::vector<double> gradient(const LogisticParams& p, const Matrix& x, std::span<const double> y,
                             std::span<const double> w, double l2);
LogisticParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y,
                     std::span<const double> w, std::vector<double>* loss_history = nullptr);

}  // namespace logistic

namespace tree {

TreeParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y, std::span<const double> w,
                 data::Task task);
double evaluate(const TreeParams& t, std::span<const double> row);
/// Weighted impurity (gini or variance) of the rows reaching each node, times their weight.
std::vector<double> node_impurities(const TreeParams& t, const Matrix& x, std::span<const double> y,
                                    std::span<const double> w, data::Task task);

}  // namespace tree

namespace mlp {

MlpParams train(const Hyperparameters& hp, std::uint64_t seed, const Matrix& x, std::span<const double> y,
                std::vector<double>* loss_history = nullptr);
double forward(const MlpParams& p, std::span<const double> row);

}  // namespace mlp

namespace linear {

LinearParams train(const Hyperparameters& hp, const Matrix& x, std::span<const double> y, std::span<const double> w);

}  // namespace linear

}  // namespace fairbench::learners
