#include "alis/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alis/error.hpp"

namespace alis {

namespace {

void check_aligned(std::span<const double> losses, const QueryDistribution& dist) {
    if (losses.size() != dist.size())
        throw InvalidInput("loss vector and distribution are not aligned");
    if (losses.empty()) throw InvalidInput("empty pool");
}

void check_weights(std::span<const double> losses, const QueryDistribution& dist) {
    check_aligned(losses, dist);
    for (std::size_t j = 0; j < losses.size(); ++j) {
        if (!(losses[j] >= 0.0) || !std::isfinite(losses[j]))
            throw InvalidInput("loss " + std::to_string(j) + " is negative or not finite");
        const double p = dist.probabilities[j];
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability " + std::to_string(j) + " outside [0, 1]");
        if (losses[j] > 0.0 && p == 0.0)
            throw InfiniteWeight("point " + std::to_string(j) +
                                 " has positive loss but zero query probability");
    }
}

template <class Urbg>
EstimatorSample draw_sample(std::span<const double> losses, const QueryDistribution& dist, Urbg& rng) {
    const std::size_t n = losses.size();
    EstimatorSample s;
    s.indicators.resize(n);
    s.h_values.resize(n);
    double weighted = 0.0;
    double plain = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double p = dist.probabilities[j];
        const int q = uniform01(rng) < p ? 1 : 0;
        const double l = losses[j];
        s.indicators[j] = q;
        // zero-loss points with p = 0 never fire and contribute nothing
        const double ratio = q ? l / p : 0.0;
        s.h_values[j] = l - ratio;
        weighted += ratio;
        plain += l;
    }
    s.weighted_mean = weighted / static_cast<double>(n);
    s.plain_mean = plain / static_cast<double>(n);
    return s;
}

}  // namespace

double m_p(std::span<const double> losses, const QueryDistribution& dist) {
    check_weights(losses, dist);
    double total = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) {
        if (losses[j] == 0.0) continue;
        total += losses[j] / dist.probabilities[j];
    }
    return total;
}

double m_q(std::span<const double> losses) {
    if (losses.empty()) throw InvalidInput("m_q: empty pool");
    double total = 0.0;
    for (double l : losses) total += l;
    return static_cast<double>(losses.size()) * total;
}

double c_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    const double log_inv = -std::log(delta);
    return 1.0 + (log_inv / 3.0) * (1.0 + std::sqrt(1.0 + 18.0 / log_inv));
}

double bound_term(double m_p_value, std::size_t n_t, double delta) {
    if (n_t == 0) throw InvalidInput("bound_term: n_t must be at least 1");
    return c_delta(delta) * m_p_value / static_cast<double>(n_t);
}

double estimator_variance(double l, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidInput("estimator_variance: p must lie in (0, 1]");
    if (!(l >= 0.0)) throw InvalidInput("estimator_variance: loss must be nonnegative");
    return l * l * (1.0 / p - 1.0);
}

double variance_sum(std::span<const double> losses, const QueryDistribution& dist) {
    check_weights(losses, dist);
    double s = 0.0;
    for (std::size_t j = 0; j < losses.size(); ++j) {
        if (losses[j] == 0.0) continue;
        s += estimator_variance(losses[j], dist.probabilities[j]);
    }
    return s;
}

double bernstein_level(double m_p_value, double var_sum, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (!(m_p_value >= 0.0) || !(var_sum >= 0.0))
        throw InvalidInput("bernstein_level: negative scale");
    if (m_p_value == 0.0) return 0.0;
    const double log_inv = -std::log(delta);
    return (m_p_value * log_inv / 3.0) *
           (1.0 + std::sqrt(1.0 + 18.0 * var_sum / (m_p_value * m_p_value * log_inv)));
}

BoundReport make_bound_report(std::size_t iteration, std::span<const double> losses,
                              const QueryDistribution& dist, double delta,
                              std::optional<double> holdout_loss_proxy) {
    BoundReport r;
    r.iteration = iteration;
    r.n_t = losses.size();
    r.m_p = m_p(losses, dist);
    r.m_q = m_q(losses);
    r.delta = delta;
    r.c_delta = c_delta(delta);
    r.bound_term = r.c_delta * r.m_p / static_cast<double>(r.n_t);
    double total = 0.0;
    for (double l : losses) total += l;
    r.mean_pseudo_loss = total / static_cast<double>(r.n_t);
    r.holdout_loss_proxy = holdout_loss_proxy;
    return r;
}

EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 Rng& rng) {
    check_weights(losses, dist);
    return draw_sample(losses, dist, rng);
}

EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 SplitMix64& rng) {
    check_weights(losses, dist);
    return draw_sample(losses, dist, rng);
}

EstimatorSample sample_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                 std::uint64_t seed) {
    Rng rng = make_rng(seed, 0);
    return sample_estimator(losses, dist, rng);
}

EstimatorSummary simulate_estimator(std::span<const double> losses, const QueryDistribution& dist,
                                    std::size_t trials, std::uint64_t seed,
                                    std::span<const double> epsilons) {
    if (trials == 0) throw InvalidInput("simulate_estimator: trials must be at least 1");
    check_weights(losses, dist);
    const std::size_t n = losses.size();
    const double n_d = static_cast<double>(n);

    EstimatorSummary out;
    out.trials = trials;
    out.m_p = m_p(losses, dist);
    out.epsilons.assign(epsilons.begin(), epsilons.end());
    std::vector<std::size_t> exceed(epsilons.size(), 0);

    // Welford accumulators: per point for H_j, and for the weighted mean.
    std::vector<double> h_mean(n, 0.0), h_m2(n, 0.0), h_sq(n, 0.0);
    double wm_mean = 0.0, wm_m2 = 0.0;

    for (std::size_t k = 0; k < trials; ++k) {
        SplitMix64 rng(mix_seed(seed, k));
        const EstimatorSample s = draw_sample(losses, dist, rng);
        const double count = static_cast<double>(k + 1);
        double h_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = s.h_values[j];
            const double diff = h - h_mean[j];
            h_mean[j] += diff / count;
            h_m2[j] += diff * (h - h_mean[j]);
            h_sq[j] += h * h;
            h_sum += h;
            out.max_abs_h = std::max(out.max_abs_h, std::abs(h));
        }
        const double diff = s.weighted_mean - wm_mean;
        wm_mean += diff / count;
        wm_m2 += diff * (s.weighted_mean - wm_mean);
        for (std::size_t e = 0; e < epsilons.size(); ++e) {
            if (h_sum / n_d > epsilons[e]) ++exceed[e];
        }
        if (k == 0) out.plain_mean = s.plain_mean;
    }

    const double t = static_cast<double>(trials);
    out.mean_weighted_mean = wm_mean;
    out.empirical_mean_gap = std::abs(wm_mean - out.plain_mean);
    out.weighted_mean_std = trials > 1 ? std::sqrt(wm_m2 / (t - 1.0)) : 0.0;
    out.per_point_empirical_variance.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        out.per_point_empirical_variance[j] = trials > 1 ? h_m2[j] / (t - 1.0) : 0.0;
        out.second_moment_sum += h_sq[j] / t;
    }
    out.tail_exceed_fraction.resize(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e)
        out.tail_exceed_fraction[e] = static_cast<double>(exceed[e]) / t;
    return out;
}

}  // namespace alis
