#include "alis/core.hpp"

#include <cmath>
#include <string>

#include "alis/error.hpp"

namespace alis {

Dataset::Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t dim)
    : features_(std::move(features)), labels_(std::move(labels)), dim_(dim) {
    if (dim_ == 0) throw InvalidInput("dataset dimension must be at least 1");
    if (labels_.empty()) throw InvalidInput("dataset must contain at least one point");
    if (features_.size() != labels_.size() * dim_)
        throw InvalidInput("feature matrix has " + std::to_string(features_.size()) +
                           " entries, expected " + std::to_string(labels_.size() * dim_));
    for (std::size_t i = 0; i < features_.size(); ++i) {
        if (!std::isfinite(features_[i]))
            throw InvalidInput("non-finite feature at point " + std::to_string(i / dim_));
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] != 1 && labels_[i] != -1)
            throw InvalidInput("label of point " + std::to_string(i) + " is not -1 or +1");
    }
}

std::string_view to_string(LossKind kind) {
    switch (kind) {
        case LossKind::Squared: return "squared";
        case LossKind::Logistic: return "logistic";
        case LossKind::Hinge: return "hinge";
    }
    return "unknown";
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "squared") return LossKind::Squared;
    if (name == "logistic") return LossKind::Logistic;
    if (name == "hinge") return LossKind::Hinge;
    throw InvalidInput("unknown loss kind '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
    if (max_iterations == 0) throw InvalidInput("max_iterations must be positive");
    if (!(gradient_tolerance > 0.0)) throw InvalidInput("gradient_tolerance must be positive");
    if (!(step_size > 0.0) || !std::isfinite(step_size))
        throw InvalidInput("step_size must be positive");
    if (!(l2_regularization >= 0.0) || !std::isfinite(l2_regularization))
        throw InvalidInput("l2_regularization must be nonnegative");
}

double score(const LinearModel& model, std::span<const double> x) {
    if (x.size() != model.weights.size())
        throw InvalidInput("score: point has dimension " + std::to_string(x.size()) +
                           ", model expects " + std::to_string(model.weights.size()));
    double f = model.bias;
    for (std::size_t i = 0; i < x.size(); ++i) f += model.weights[i] * x[i];
    return f;
}

namespace {

void check_loss_args(Label y, double f) {
    if (y != 1 && y != -1) throw InvalidInput("label must be -1 or +1");
    if (!std::isfinite(f)) throw InvalidInput("loss: score is not finite");
}

}  // namespace

double loss(LossKind kind, Label y, double f) {
    check_loss_args(y, f);
    const double margin = y * f;
    switch (kind) {
        case LossKind::Squared: {
            const double r = y - f;
            return r * r;
        }
        case LossKind::Logistic:
            // ln(1 + e^{-m}) without overflow for large |m|
            return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
        case LossKind::Hinge:
            return margin < 1.0 ? 1.0 - margin : 0.0;
    }
    return 0.0;
}

double loss_derivative(LossKind kind, Label y, double f) {
    check_loss_args(y, f);
    const double margin = y * f;
    switch (kind) {
        case LossKind::Squared:
            return 2.0 * (f - y);
        case LossKind::Logistic: {
            // -y * sigmoid(-m)
            const double s = margin > 0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                        : 1.0 / (1.0 + std::exp(margin));
            return -y * s;
        }
        case LossKind::Hinge:
            return margin < 1.0 ? -static_cast<double>(y) : 0.0;
    }
    return 0.0;
}

}  // namespace alis
