#include "alis/train.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alis/error.hpp"

namespace alis {

namespace {

std::size_t checked_dim(std::span<const WeightedPoint> points) {
    if (points.empty()) throw InvalidInput("train_weighted: no points");
    const std::size_t d = points.front().x.size();
    if (d == 0) throw InvalidInput("train_weighted: points have dimension 0");
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto& p = points[k];
        if (p.x.size() != d) throw InvalidInput("train_weighted: ragged point dimensions");
        if (!(p.weight > 0.0) || !std::isfinite(p.weight))
            throw InvalidInput("train_weighted: weight of point " + std::to_string(k) +
                               " is not a positive finite number");
        if (p.y != 1 && p.y != -1) throw InvalidInput("train_weighted: label is not -1 or +1");
    }
    return d;
}

double linear(std::span<const double> params, std::span<const double> x) {
    double f = params[x.size()];
    for (std::size_t i = 0; i < x.size(); ++i) f += params[i] * x[i];
    return f;
}

double total_weight(std::span<const WeightedPoint> points) {
    double w = 0.0;
    for (const auto& p : points) w += p.weight;
    return w;
}

// Objective and gradient in one pass. grad must have size d + 1.
double evaluate(std::span<const WeightedPoint> points, LossKind kind, double l2,
                std::span<const double> params, std::span<double> grad) {
    const std::size_t d = params.size() - 1;
    std::fill(grad.begin(), grad.end(), 0.0);
    const double norm = total_weight(points);
    double value = 0.0;
    for (const auto& p : points) {
        const double f = linear(params, p.x);
        if (!std::isfinite(f)) return f;
        const double c = p.weight / norm;
        value += c * loss(kind, p.y, f);
        const double g = c * loss_derivative(kind, p.y, f);
        for (std::size_t i = 0; i < d; ++i) grad[i] += g * p.x[i];
        grad[d] += g;
    }
    for (std::size_t i = 0; i < d; ++i) {
        value += l2 * params[i] * params[i];
        grad[i] += 2.0 * l2 * params[i];
    }
    return value;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Upper bound on the largest Hessian eigenvalue of the normalized objective.
double curvature_bound(std::span<const WeightedPoint> points, LossKind kind, double l2) {
    double max_sq = 1.0;
    for (const auto& p : points) {
        double s = 1.0;
        for (double v : p.x) s += v * v;
        max_sq = std::max(max_sq, s);
    }
    const double loss_curvature = kind == LossKind::Logistic ? 0.25 : 2.0;
    return loss_curvature * max_sq + 2.0 * l2;
}

}  // namespace

double weighted_objective(std::span<const WeightedPoint> points, LossKind kind, double l2,
                          std::span<const double> params) {
    const std::size_t d = checked_dim(points);
    if (params.size() != d + 1) throw InvalidInput("weighted_objective: parameter size mismatch");
    std::vector<double> grad(d + 1);
    return evaluate(points, kind, l2, params, grad);
}

std::vector<double> weighted_gradient(std::span<const WeightedPoint> points, LossKind kind,
                                      double l2, std::span<const double> params) {
    const std::size_t d = checked_dim(points);
    if (params.size() != d + 1) throw InvalidInput("weighted_gradient: parameter size mismatch");
    std::vector<double> grad(d + 1);
    evaluate(points, kind, l2, params, grad);
    return grad;
}

TrainResult train_weighted(std::span<const WeightedPoint> points, LossKind kind,
                           const TrainConfig& config) {
    config.validate();
    const std::size_t d = checked_dim(points);
    const double l2 = config.l2_regularization;
    const double step = config.step_size / curvature_bound(points, kind, l2);

    std::vector<double> params(d + 1, 0.0);
    std::vector<double> grad(d + 1);
    TrainResult result;
    for (std::size_t it = 0;; ++it) {
        const double value = evaluate(points, kind, l2, params, grad);
        if (!std::isfinite(value))
            throw Divergence(it, "train_weighted: objective is not finite at iteration " +
                                     std::to_string(it));
        result.objective = value;
        result.gradient_norm = norm2(grad);
        result.iterations = it;
        if (result.gradient_norm <= config.gradient_tolerance) {
            result.converged = true;
            break;
        }
        if (it == config.max_iterations) break;
        for (std::size_t i = 0; i <= d; ++i) params[i] -= step * grad[i];
    }
    result.model.bias = params[d];
    params.pop_back();
    result.model.weights = std::move(params);
    return result;
}

TrainResult train_erm(const Dataset& data, std::span<const Index> indices, LossKind kind,
                      const TrainConfig& config) {
    std::vector<WeightedPoint> points;
    points.reserve(indices.size());
    for (Index i : indices) {
        if (i >= data.size()) throw InvalidInput("train_erm: index out of range");
        points.push_back({data.row(i), data.label(i), 1.0});
    }
    return train_weighted(points, kind, config);
}

}  // namespace alis
