#include <cmath>
#include <string>

#include "fairbench/error.hpp"
#include "fairbench/learners.hpp"

namespace fairbench::learners {

namespace {

constexpr LearnerKind kAllKinds[] = {LearnerKind::logistic_regression, LearnerKind::decision_tree, LearnerKind::mlp,
                                     LearnerKind::linear_regression, LearnerKind::decision_tree_regressor};

void check_hyperparameters(const Hyperparameters& hp) {
    if (!(hp.learning_rate > 0) || !(hp.mlp_learning_rate > 0)) throw InvalidArgument("learning rates must be positive");
    if (!(hp.l2 >= 0)) throw InvalidArgument("l2 penalty must be non-negative");
    if (!(hp.threshold > 0 && hp.threshold < 1)) throw InvalidArgument("threshold must be in (0, 1)");
    if (!(hp.min_leaf_weight > 0)) throw InvalidArgument("min leaf weight must be positive");
    if (hp.hidden_units == 0) throw InvalidArgument("mlp needs at least one hidden unit");
    if (!(hp.ridge >= 0)) throw InvalidArgument("ridge must be non-negative");
}

}  // namespace

std::string_view to_string(LearnerKind k) noexcept {
    switch (k) {
        case LearnerKind::logistic_regression: return "logistic-regression";
        case LearnerKind::decision_tree: return "decision-tree";
        case LearnerKind::mlp: return "mlp";
        case LearnerKind::linear_regression: return "linear-regression";
        case LearnerKind::decision_tree_regressor: return "decision-tree-regressor";
    }
    return "";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view s) noexcept {
    for (LearnerKind k : kAllKinds) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

Capability capability(LearnerKind kind) noexcept {
    switch (kind) {
        case LearnerKind::logistic_regression:
        case LearnerKind::decision_tree: return {true, data::Task::classification};
        case LearnerKind::mlp: return {false, data::Task::classification};
        case LearnerKind::linear_regression:
        case LearnerKind::decision_tree_regressor: return {true, data::Task::regression};
    }
    return {};
}

Capability capability(std::string_view kind) {
    if (auto k = parse_learner_kind(kind)) return capability(*k);
    throw UnknownReferenceError("learner kind", std::string(kind));
}

FittedModel fit(const LearnerSpec& spec, const data::DataTable& features, std::span<const double> targets,
                std::optional<std::span<const double>> weights) {
    const Capability cap = capability(spec.kind);
    if (weights && !cap.supports_sample_weight) {
        throw CapabilityError(std::string(to_string(spec.kind)) + " does not support sample weights");
    }
    check_hyperparameters(spec.params);
    const std::size_t n = features.rows();
    if (n == 0) throw InvalidArgument("cannot fit on zero rows");
    if (targets.size() != n) {
        throw InvalidArgument("target length " + std::to_string(targets.size()) + " does not match " +
                              std::to_string(n) + " rows");
    }
    std::vector<double> w(n, 1.0);
    if (weights) {
        if (weights->size() != n) throw InvalidArgument("weight vector length does not match row count");
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = (*weights)[i];
            if (!(v >= 0) || !std::isfinite(v)) throw InvalidArgument("sample weights must be finite and non-negative");
            w[i] = v;
            total += v;
        }
        if (!(total > 0)) throw InvalidArgument("sample weights are all zero");
    }
    for (double t : targets) {
        if (!std::isfinite(t)) throw InvalidArgument("targets must be finite");
        if (cap.task == data::Task::classification && t != 0.0 && t != 1.0) {
            throw InvalidArgument("classification targets must be 0 or 1");
        }
    }

    FittedModel model;
    model.kind = spec.kind;
    model.task = cap.task;
    model.encoder = fit_encoder(features);
    const Matrix x = model.encoder.transform(features);

    if (cap.task == data::Task::classification) {
        bool single = true;
        for (double t : targets) single = single && t == targets[0];
        if (single) {
            model.params = ConstantParams{targets[0]};
            model.flags.push_back("constant predictor: training labels contain a single class");
            return model;
        }
    }

    switch (spec.kind) {
        case LearnerKind::logistic_regression:
            model.params = logistic::train(spec.params, x, targets, w, &model.loss_history);
            break;
        case LearnerKind::decision_tree:
        case LearnerKind::decision_tree_regressor:
            model.params = tree::train(spec.params, x, targets, w, cap.task);
            break;
        case LearnerKind::mlp: {
            auto p = mlp::train(spec.params, spec.seed, x, targets, &model.loss_history);
            model.params = std::move(p);
            break;
        }
        case LearnerKind::linear_regression:
            model.params = linear::train(spec.params, x, targets, w);
            break;
    }
    return model;
}

std::vector<double> decision_values(const FittedModel& model, const Matrix& x) {
    std::vector<double> out(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) {
        const auto row = x.row(i);
        out[i] = std::visit(
            [&](const auto& p) -> double {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, ConstantParams>) {
                    return p.value;
                } else if constexpr (std::is_same_v<P, LogisticParams>) {
                    double z = p.bias;
                    for (std::size_t j = 0; j < row.size(); ++j) z += p.weights[j] * row[j];
                    return 1.0 / (1.0 + std::exp(-z));
                } else if constexpr (std::is_same_v<P, TreeParams>) {
                    return tree::evaluate(p, row);
                } else if constexpr (std::is_same_v<P, MlpParams>) {
                    return mlp::forward(p, row);
                } else {
                    double v = p.intercept;
                    for (std::size_t j = 0; j < row.size(); ++j) v += p.coefficients[j] * row[j];
                    return v;
                }
            },
            model.params);
    }
    return out;
}

Prediction predict_detailed(const FittedModel& model, const data::DataTable& features) {
    Prediction out;
    const data::DataTable scaled = model.scaler ? data::apply_scaler(*model.scaler, features) : features;
    const Matrix x = model.encoder.transform(scaled, &out.unseen_levels);
    out.values = decision_values(model, x);
    if (model.task == data::Task::classification) {
        double threshold = 0.5;
        if (const auto* lp = std::get_if<LogisticParams>(&model.params)) threshold = lp->threshold;
        if (const auto* mp = std::get_if<MlpParams>(&model.params)) threshold = mp->threshold;
        const bool is_tree = std::holds_alternative<TreeParams>(model.params);
        for (double& v : out.values) {
            // Trees break an even leaf toward the negative class.
            v = (is_tree ? v > threshold : v >= threshold) ? 1.0 : 0.0;
        }
    }
    return out;
}

std::vector<double> predict(const FittedModel& model, const data::DataTable& features) {
    return predict_detailed(model, features).values;
}

}  // namespace fairbench::learners
