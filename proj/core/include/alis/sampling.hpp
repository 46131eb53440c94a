#pragma once

// Pseudo-labels, pseudo-losses and query distributions over the unlabeled pool.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alis/core.hpp"

namespace alis {

// Query probabilities aligned with PoolState::unlabeled.
struct QueryDistribution {
    std::vector<double> probabilities;
    double smoothing_gamma = 0.0;

    std::size_t size() const noexcept { return probabilities.size(); }

    friend bool operator==(const QueryDistribution&, const QueryDistribution&) = default;
};

struct QueriedPoint {
    Index pool_index = 0;  // dataset index, a member of PoolState::unlabeled
    double probability = 0.0;
    double importance_weight = 0.0;  // exactly 1 / probability

    friend bool operator==(const QueriedPoint&, const QueriedPoint&) = default;
};

struct QueryPlan {
    std::vector<QueriedPoint> queried;  // distinct, sorted by pool_index
    std::size_t draw_count = 0;         // m_t
    std::uint64_t seed = 0;

    friend bool operator==(const QueryPlan&, const QueryPlan&) = default;
};

// -sign(f(x)) with sign(0) = +1, so the decision boundary gets pseudo-label -1.
Label pseudo_label(const LinearModel& model, std::span<const double> x);

// Loss at the pseudo-label; for Squared this is (1 + |f(x)|)^2.
double pseudo_loss(LossKind kind, const LinearModel& model, std::span<const double> x);

// Pseudo-losses for every index in `indices`, in order.
std::vector<double> pseudo_losses(LossKind kind, const LinearModel& model, const Dataset& data,
                                  std::span<const Index> indices);

// p_j = sqrt(l_j) / sum_k sqrt(l_k), the minimizer of sum_j l_j / p_j over the simplex.
// Falls back to uniform when every loss is <= 1e-300.
QueryDistribution optimal_distribution(std::span<const double> pseudo_losses);

// (1 - gamma) p + gamma / n. gamma must lie in [0, 1).
QueryDistribution smooth(const QueryDistribution& dist, double gamma);

QueryDistribution uniform_distribution(std::size_t n);

// m_t independent categorical draws from `dist` over pool.unlabeled, deduplicated. Requires
// 1 <= m_t <= |pool.unlabeled|.
QueryPlan draw_queries(const QueryDistribution& dist, const PoolState& pool, std::size_t m_t,
                       std::uint64_t seed);

}  // namespace alis
