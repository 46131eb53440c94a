#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "alis/error.hpp"
#include "alis/rng.hpp"
#include "alis/sampling.hpp"

namespace alis {
namespace {

LinearModel model_with_score(double f) { return {{0.0}, f}; }
const std::vector<double> kAnyPoint{0.3};

TEST(PseudoLabel, IsNegatedSign) {
    EXPECT_EQ(pseudo_label(model_with_score(0.7), kAnyPoint), -1);
    EXPECT_EQ(pseudo_label(model_with_score(-2.0), kAnyPoint), 1);
    EXPECT_EQ(pseudo_label(model_with_score(0.0), kAnyPoint), -1);
}

TEST(PseudoLoss, Examples) {
    EXPECT_DOUBLE_EQ(pseudo_loss(LossKind::Squared, model_with_score(0.5), kAnyPoint), 2.25);
    EXPECT_DOUBLE_EQ(pseudo_loss(LossKind::Squared, model_with_score(0.0), kAnyPoint), 1.0);
    EXPECT_DOUBLE_EQ(pseudo_loss(LossKind::Hinge, model_with_score(2.0), kAnyPoint), 3.0);
}

TEST(PseudoLoss, SquaredEqualsOnePlusAbsScoreSquared) {
    for (double f : {-3.0, -0.25, 0.0, 0.1, 4.0}) {
        const double expected = (1 + std::abs(f)) * (1 + std::abs(f));
        EXPECT_DOUBLE_EQ(pseudo_loss(LossKind::Squared, model_with_score(f), kAnyPoint), expected);
    }
}

// The pseudo-label is the worse of the two labels for every loss.
TEST(PseudoLoss, DominatesTrueLossProperty) {
    Rng rng = make_rng(17, 0);
    for (LossKind kind : {LossKind::Squared, LossKind::Logistic, LossKind::Hinge}) {
        for (int k = 0; k < 1000; ++k) {
            LinearModel model{{10 * uniform01(rng) - 5, 10 * uniform01(rng) - 5}, 4 * uniform01(rng) - 2};
            const std::vector<double> x{6 * uniform01(rng) - 3, 6 * uniform01(rng) - 3};
            const double f = score(model, x);
            const double pl = pseudo_loss(kind, model, x);
            EXPECT_LE(loss(kind, 1, f), pl);
            EXPECT_LE(loss(kind, -1, f), pl);
        }
    }
}

TEST(OptimalDistribution, Examples) {
    auto p = optimal_distribution(std::vector<double>{1, 4}).probabilities;
    EXPECT_NEAR(p[0], 1.0 / 3, 1e-15);
    EXPECT_NEAR(p[1], 2.0 / 3, 1e-15);
    p = optimal_distribution(std::vector<double>{4, 4, 4}).probabilities;
    for (double v : p) EXPECT_NEAR(v, 1.0 / 3, 1e-15);
    p = optimal_distribution(std::vector<double>{0, 9}).probabilities;
    EXPECT_EQ(p[0], 0.0);
    EXPECT_EQ(p[1], 1.0);
}

TEST(OptimalDistribution, AllZeroFallsBackToUniform) {
    const auto d = optimal_distribution(std::vector<double>{0, 0, 1e-301, 0});
    for (double v : d.probabilities) EXPECT_DOUBLE_EQ(v, 0.25);
    EXPECT_EQ(d.smoothing_gamma, 0.0);
}

TEST(OptimalDistribution, RejectsInvalidLosses) {
    EXPECT_THROW(optimal_distribution(std::vector<double>{1, -1}), InvalidInput);
    EXPECT_THROW(optimal_distribution(std::vector<double>{1, NAN}), InvalidInput);
    EXPECT_THROW(optimal_distribution(std::vector<double>{}), InvalidInput);
}

TEST(OptimalDistribution, NormalizedPermutationAndScaleEquivariant) {
    Rng rng = make_rng(29, 0);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 100);
        std::vector<double> l(n);
        for (double& v : l) v = 20 * uniform01(rng);
        const auto p = optimal_distribution(l).probabilities;
        EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(uniform01(rng) * i)]);
        std::vector<double> permuted(n);
        for (std::size_t j = 0; j < n; ++j) permuted[j] = l[perm[j]];
        const auto pp = optimal_distribution(permuted).probabilities;

        const double c = 1e-3 + 1e3 * uniform01(rng);
        std::vector<double> scaled(l);
        for (double& v : scaled) v *= c;
        const auto ps = optimal_distribution(scaled).probabilities;
        for (std::size_t j = 0; j < n; ++j) {
            EXPECT_NEAR(pp[j], p[perm[j]], 1e-12);
            EXPECT_NEAR(ps[j], p[j], 1e-12);
        }
    }
}

TEST(Smooth, Examples) {
    const QueryDistribution d{{0.2, 0.8}, 0.0};
    EXPECT_EQ(smooth(d, 0.0).probabilities, d.probabilities);

    const auto s = smooth(QueryDistribution{{0.0, 1.0}, 0.0}, 0.5);
    EXPECT_DOUBLE_EQ(s.probabilities[0], 0.25);
    EXPECT_DOUBLE_EQ(s.probabilities[1], 0.75);
    EXPECT_EQ(s.smoothing_gamma, 0.5);

    const auto u = smooth(uniform_distribution(7), 0.01);
    for (double v : u.probabilities) EXPECT_NEAR(v, 1.0 / 7, 1e-15);
}

TEST(Smooth, RejectsGammaOutsideUnitInterval) {
    const auto d = uniform_distribution(3);
    EXPECT_THROW(smooth(d, 1.0), InvalidInput);
    EXPECT_THROW(smooth(d, -0.1), InvalidInput);
}

TEST(Smooth, CapsImportanceWeights) {
    const auto s = smooth(optimal_distribution(std::vector<double>{0, 0, 1, 100}), 0.1);
    for (double p : s.probabilities) EXPECT_LE(1.0 / p, 4 / 0.1 + 1e-9);
    EXPECT_NEAR(std::accumulate(s.probabilities.begin(), s.probabilities.end(), 0.0), 1.0, 1e-12);
}

TEST(UniformDistribution, Examples) {
    EXPECT_EQ(uniform_distribution(4).probabilities, std::vector<double>(4, 0.25));
    EXPECT_EQ(uniform_distribution(1).probabilities, std::vector<double>{1.0});
    const auto p = uniform_distribution(3).probabilities;
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(uniform_distribution(0), InvalidInput);
}

PoolState pool_of(std::vector<Index> unlabeled) {
    PoolState p;
    p.unlabeled = std::move(unlabeled);
    return p;
}

TEST(DrawQueries, ForcedSinglePoint) {
    const auto plan = draw_queries(uniform_distribution(1), pool_of({42}), 1, 7);
    ASSERT_EQ(plan.queried.size(), 1u);
    EXPECT_EQ(plan.queried[0].pool_index, 42u);
    EXPECT_EQ(plan.queried[0].importance_weight, 1.0);
    EXPECT_EQ(plan.draw_count, 1u);
}

TEST(DrawQueries, DegenerateDistributionQueriesOnePoint) {
    const QueryDistribution d{{0.0, 1.0}, 0.0};
    const auto plan = draw_queries(d, pool_of({1, 2}), 2, 3);
    ASSERT_EQ(plan.queried.size(), 1u);
    EXPECT_EQ(plan.queried[0].pool_index, 2u);
    EXPECT_EQ(plan.queried[0].probability, 1.0);
}

TEST(DrawQueries, RejectsMoreDrawsThanPoints) {
    const QueryDistribution d{{0.0, 1.0}, 0.0};
    EXPECT_THROW(draw_queries(d, pool_of({1, 2}), 5, 3), InvalidInput);
    EXPECT_THROW(draw_queries(d, pool_of({1, 2}), 0, 3), InvalidInput);
    EXPECT_THROW(draw_queries(d, pool_of({1, 2, 3}), 1, 3), InvalidInput);
}

TEST(DrawQueries, PlanInvariants) {
    Rng rng = make_rng(31, 0);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 40);
        std::vector<double> l(n);
        for (double& v : l) v = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng);
        const auto d = smooth(optimal_distribution(l), uniform01(rng) < 0.5 ? 0.0 : 0.05);
        std::vector<Index> unlabeled(n);
        for (std::size_t j = 0; j < n; ++j) unlabeled[j] = 3 * j + 1;
        const std::size_t m = 1 + static_cast<std::size_t>(uniform01(rng) * n);
        const auto plan = draw_queries(d, pool_of(unlabeled), m, static_cast<std::uint64_t>(k));
        EXPECT_LE(plan.queried.size(), m);
        EXPECT_GE(plan.queried.size(), 1u);
        for (std::size_t i = 0; i < plan.queried.size(); ++i) {
            const auto& q = plan.queried[i];
            if (i > 0) EXPECT_LT(plan.queried[i - 1].pool_index, q.pool_index);
            const auto pos = std::find(unlabeled.begin(), unlabeled.end(), q.pool_index);
            ASSERT_NE(pos, unlabeled.end());
            EXPECT_EQ(q.probability, d.probabilities[static_cast<std::size_t>(pos - unlabeled.begin())]);
            EXPECT_GT(q.probability, 0.0);
            EXPECT_EQ(q.importance_weight, 1.0 / q.probability);
        }
    }
}

TEST(DrawQueries, SameSeedIsIdentical) {
    const auto d = optimal_distribution(std::vector<double>{1, 2, 3, 4, 5, 6});
    const auto pool = pool_of({0, 1, 2, 3, 4, 5});
    EXPECT_EQ(draw_queries(d, pool, 4, 99), draw_queries(d, pool, 4, 99));
}

// m_t = 10^4 draws from [0.5, 0.5]: each draw lands on index 1 with probability 1/2, so the
// empirical frequency has sigma = sqrt(0.25 / 10^4) = 0.005. Counted over single-draw plans
// because one plan deduplicates.
TEST(DrawQueries, EmpiricalFrequencyMatchesDistribution) {
    const QueryDistribution d{{0.5, 0.5}, 0.0};
    const auto pool = pool_of({1, 2});
    std::size_t hits = 0;
    constexpr std::size_t draws = 10000;
    for (std::size_t k = 0; k < draws; ++k)
        if (draw_queries(d, pool, 1, mix_seed(1234, k)).queried[0].pool_index == 1) ++hits;
    EXPECT_NEAR(static_cast<double>(hits) / draws, 0.5, 3 * 0.005);
}

TEST(DrawQueries, ChiSquareMarginals) {
    const QueryDistribution d{{0.05, 0.15, 0.3, 0.5}, 0.0};
    const auto pool = pool_of({0, 1, 2, 3});
    std::vector<double> counts(4, 0.0);
    constexpr std::size_t draws = 10000;
    for (std::size_t k = 0; k < draws; ++k) counts[draw_queries(d, pool, 1, mix_seed(77, k)).queried[0].pool_index] += 1;
    double chi2 = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        const double e = d.probabilities[j] * draws;
        chi2 += (counts[j] - e) * (counts[j] - e) / e;
    }
    EXPECT_LT(chi2, 16.266);  // 99.9% quantile, 3 dof
}

}  // namespace
}  // namespace alis
