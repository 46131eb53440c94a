#pragma once

// The true-loss bound for importance-sampled queries and the Monte Carlo machinery that checks
// its ingredients.
//
// For pseudo-losses l_j and query probabilities p_j over the n_t unlabeled points,
//
//   M_p     = sum_j l_j / p_j
//   c_delta = 1 + (L/3) (1 + sqrt(1 + 18/L)),   L = ln(1/delta)
//   bound   = c_delta * M_p / n_t
//
// c_delta is the weighted-loss coefficient (1) plus the Bernstein deviation coefficient obtained
// with the worst-case variance sum S <= M_p^2.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "alis/rng.hpp"
#include "alis/sampling.hpp"

namespace alis {

struct BoundReport {
    std::size_t iteration = 0;
    std::size_t n_t = 0;
    double m_p = 0.0;  // under the strategy's unsmoothed distribution
    double m_q = 0.0;  // under the uniform distribution
    double c_delta = 0.0;
    double delta = 0.0;
    double bound_term = 0.0;  // c_delta * m_p / n_t
    double mean_pseudo_loss = 0.0;
    std::optional<double> holdout_loss_proxy;  // |holdout loss - mean pseudo-loss|, stands in for the generalization gap

    friend bool operator==(const BoundReport&, const BoundReport&) = default;
};

// One realization of the Bernoulli query indicators.
struct EstimatorSample {
    std::vector<int> indicators;   // Q_j in {0, 1}
    std::vector<double> h_values;  // H_j = l_j (1 - Q_j / p_j)
    double weighted_mean = 0.0;    // (1/n) sum_j Q_j l_j / p_j
    double plain_mean = 0.0;       // (1/n) sum_j l_j
};

struct EstimatorSummary {
    std::size_t trials = 0;
    double plain_mean = 0.0;
    double mean_weighted_mean = 0.0;
    double empirical_mean_gap = 0.0;  // |mean_weighted_mean - plain_mean|
    double weighted_mean_std = 0.0;   // sample std of the weighted mean across trials
    std::vector<double> per_point_empirical_variance;
    double second_moment_sum = 0.0;  // sum_j mean over trials of H_j^2
    double max_abs_h = 0.0;
    double m_p = 0.0;
    std::vector<double> epsilons;
    std::vector<double> tail_exceed_fraction;  // fraction of trials with sum_j H_j / n > epsilon
};

// sum_j l_j / p_j, with 0/0 taken as 0. Throws InfiniteWeight when l_j > 0 and p_j = 0.
double m_p(std::span<const double> pseudo_losses, const QueryDistribution& dist);

// n * sum_j l_j, i.e. m_p under the uniform distribution.
double m_q(std::span<const double> pseudo_losses);

double c_delta(double delta);

double bound_term(double m_p, std::size_t n_t, double delta);

// Var(H_j) = l^2 (1/p - 1).
double estimator_variance(double l, double p);

// S = sum_j l_j^2 (1/p_j - 1).
double variance_sum(std::span<const double> losses, const QueryDistribution& dist);

// Level epsilon with exp(-eps^2 / (2 S + (2/3) M eps)) = delta, for the sum of the H_j.
double bernstein_level(double m_p, double variance_sum, double delta);

BoundReport make_bound_report(std::size_t iteration, std::span<const double> pseudo_losses,
                              const QueryDistribution& dist, double delta,
                              std::optional<double> holdout_loss_proxy = std::nullopt);

EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 Rng& rng);
EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 SplitMix64& rng);

EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 std::uint64_t seed);

// Monte Carlo over independent Bernoulli(p_j) indicators. Trial k draws from a stream derived
// from (seed, k), so the result does not depend on evaluation order.
EstimatorSummary simulate_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                    std::size_t trials, std::uint64_t seed,
                                    std::span<const double> epsilons = {});

}  // namespace alis
