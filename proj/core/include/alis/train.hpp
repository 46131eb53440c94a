#pragma once

// Weighted empirical risk minimization for linear models.
//
// The objective is the weight-normalized loss plus a ridge penalty on the weights (not the bias):
//
//   J(w, b) = sum_k c_k l(y_k, w.x_k + b) / sum_k c_k  +  l2 * |w|^2
//
// Normalizing by sum_k c_k leaves the argmin of sum_k c_k l_k unchanged when l2 = 0 and makes it
// invariant to a common rescaling of the weights for any l2.

#include <cstddef>
#include <span>
#include <vector>

#include "alis/core.hpp"

namespace alis {

struct WeightedPoint {
    std::span<const double> x;
    Label y = 1;
    double weight = 1.0;
};

struct TrainResult {
    LinearModel model;
    std::size_t iterations = 0;
    double gradient_norm = 0.0;
    double objective = 0.0;
    bool converged = false;  // false when max_iterations was reached
};

// Parameters are packed as [w_1..w_d, b].
double weighted_objective(std::span<const WeightedPoint> points, LossKind kind, double l2,
                          std::span<const double> params);
std::vector<double> weighted_gradient(std::span<const WeightedPoint> points, LossKind kind,
                                      double l2, std::span<const double> params);

// Full-batch gradient descent from the zero model with a fixed step. Deterministic in the input
// order. Throws InvalidInput on empty input, non-positive weights or ragged dimensions, and
// Divergence if the objective becomes non-finite.
TrainResult train_weighted(std::span<const WeightedPoint> points, LossKind kind,
                           const TrainConfig& config);

// Unweighted ERM: train_weighted with every weight equal to 1.
TrainResult train_erm(const Dataset& data, std::span<const Index> indices, LossKind kind,
                      const TrainConfig& config);

}  // namespace alis
