#include "alis/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alis/error.hpp"
#include "alis/rng.hpp"

namespace alis {

Label pseudo_label(const LinearModel& model, std::span<const double> x) {
    return score(model, x) >= 0.0 ? -1 : 1;
}

double pseudo_loss(LossKind kind, const LinearModel& model, std::span<const double> x) {
    const double f = score(model, x);
    return loss(kind, f >= 0.0 ? -1 : 1, f);
}

std::vector<double> pseudo_losses(LossKind kind, const LinearModel& model, const Dataset& data,
                                  std::span<const Index> indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (Index i : indices) {
        if (i >= data.size()) throw InvalidInput("pseudo_losses: index out of range");
        out.push_back(pseudo_loss(kind, model, data.row(i)));
    }
    return out;
}

QueryDistribution uniform_distribution(std::size_t n) {
    if (n == 0) throw InvalidInput("uniform_distribution: empty pool");
    return {std::vector<double>(n, 1.0 / static_cast<double>(n)), 0.0};
}

QueryDistribution optimal_distribution(std::span<const double> losses) {
    if (losses.empty()) throw InvalidInput("optimal_distribution: empty pool");
    bool all_negligible = true;
    for (std::size_t j = 0; j < losses.size(); ++j) {
        const double l = losses[j];
        if (!std::isfinite(l) || l < 0.0)
            throw InvalidInput("optimal_distribution: pseudo-loss " + std::to_string(j) +
                               " is negative or not finite");
        if (l > 1e-300) all_negligible = false;
    }
    if (all_negligible) return uniform_distribution(losses.size());

    QueryDistribution dist;
    dist.probabilities.resize(losses.size());
    double total = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) {
        dist.probabilities[j] = std::sqrt(losses[j]);
        total += dist.probabilities[j];
    }
    for (double& p : dist.probabilities) p /= total;
    return dist;
}

QueryDistribution smooth(const QueryDistribution& dist, double gamma) {
    if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("smooth: gamma must lie in [0, 1)");
    if (dist.probabilities.empty()) throw InvalidInput("smooth: empty distribution");
    QueryDistribution out{dist.probabilities, gamma};
    if (gamma == 0.0) return out;
    const double floor = gamma / static_cast<double>(out.size());
    for (double& p : out.probabilities) p = (1.0 - gamma) * p + floor;
    return out;
}

QueryPlan draw_queries(const QueryDistribution& dist, const PoolState& pool, std::size_t m_t,
                       std::uint64_t seed) {
    const std::size_t n = pool.unlabeled.size();
    if (dist.size() != n)
        throw InvalidInput("draw_queries: distribution has " + std::to_string(dist.size()) +
                           " entries for a pool of " + std::to_string(n));
    if (m_t == 0) throw InvalidInput("draw_queries: m_t must be at least 1");
    if (m_t > n)
        throw InvalidInput("draw_queries: m_t = " + std::to_string(m_t) + " exceeds the " +
                           std::to_string(n) + " unlabeled points");

    std::vector<double> cdf(n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = dist.probabilities[j];
        if (!std::isfinite(p) || p < 0.0) throw InvalidInput("draw_queries: invalid probability");
        acc += p;
        cdf[j] = acc;
    }
    if (!(acc > 0.0)) throw InvalidInput("draw_queries: distribution has no mass");

    Rng rng(mix_seed(seed, 0));
    std::vector<char> hit(n, 0);
    for (std::size_t draw = 0; draw < m_t; ++draw) {
        const double u = uniform01(rng) * acc;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = it == cdf.end() ? n - 1 : static_cast<std::size_t>(it - cdf.begin());
        // rounding can leave u at the total; walk back to the last point with mass
        while (dist.probabilities[j] == 0.0 && j > 0) --j;
        hit[j] = 1;
    }

    QueryPlan plan;
    plan.draw_count = m_t;
    plan.seed = seed;
    for (std::size_t j = 0; j < n; ++j) {
        if (!hit[j]) continue;
        const double p = dist.probabilities[j];
        plan.queried.push_back({pool.unlabeled[j], p, 1.0 / p});
    }
    std::sort(plan.queried.begin(), plan.queried.end(),
              [](const QueriedPoint& a, const QueriedPoint& b) { return a.pool_index < b.pool_index; });
    return plan;
}

}  // namespace alis
