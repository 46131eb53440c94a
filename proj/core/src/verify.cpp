#include "alis/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "alis/bounds.hpp"
#include "alis/error.hpp"
#include "alis/rng.hpp"
#include "alis/sampling.hpp"
#include "json.hpp"

namespace alis {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

CheckResult pass(std::string name, std::string detail) {
    return {std::move(name), CheckStatus::Pass, std::move(detail), {}};
}

CheckResult fail(std::string name, std::string detail, const json& instance) {
    return {std::move(name), CheckStatus::Fail, std::move(detail), instance.dump()};
}

CheckResult skip(std::string name, std::size_t trials, std::size_t needed) {
    return {std::move(name), CheckStatus::Skipped,
            "insufficient trials (" + std::to_string(trials) + " < " + std::to_string(needed) + ")", {}};
}

std::vector<double> random_losses(Rng& rng, std::size_t n, double scale = 10.0) {
    std::vector<double> l(n);
    for (double& v : l) v = scale * uniform01(rng);
    return l;
}

QueryDistribution random_distribution(Rng& rng, std::size_t n) {
    QueryDistribution d;
    d.probabilities.resize(n);
    double total = 0.0;
    for (double& p : d.probabilities) {
        p = 0.05 + uniform01(rng);
        total += p;
    }
    for (double& p : d.probabilities) p /= total;
    return d;
}

// ---- sampling suite -------------------------------------------------------

CheckResult check_dominance(std::uint64_t seed) {
    const char* name = "pseudo_loss_dominance";
    Rng rng = make_rng(seed, 11);
    std::size_t cases = 0;
    for (LossKind kind : {LossKind::Squared, LossKind::Logistic, LossKind::Hinge}) {
        for (int k = 0; k < 1000; ++k) {
            const std::size_t d = 1 + static_cast<std::size_t>(uniform01(rng) * 5);
            LinearModel model{std::vector<double>(d), 6.0 * uniform01(rng) - 3.0};
            std::vector<double> x(d);
            for (auto& w : model.weights) w = 6.0 * uniform01(rng) - 3.0;
            for (auto& v : x) v = 6.0 * uniform01(rng) - 3.0;
            const double pl = pseudo_loss(kind, model, x);
            const double f = score(model, x);
            for (Label y : {-1, 1}) {
                ++cases;
                if (loss(kind, y, f) > pl)
                    return fail(name, "loss exceeds pseudo-loss",
                                {{"loss", std::string(to_string(kind))}, {"weights", model.weights},
                                 {"bias", model.bias}, {"x", x}, {"y", y}});
            }
        }
    }
    return pass(name, std::to_string(cases) + " (model, point, label) cases");
}

CheckResult check_distribution_shape(std::uint64_t seed) {
    const char* name = "optimal_distribution_equivariance";
    Rng rng = make_rng(seed, 12);
    double worst_sum = 0.0, worst_perm = 0.0, worst_scale = 0.0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 50);
        const auto l = random_losses(rng, n);
        const auto p = optimal_distribution(l).probabilities;
        worst_sum = std::max(worst_sum, std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0));

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::reverse(perm.begin(), perm.end());
        std::vector<double> lp(n);
        for (std::size_t j = 0; j < n; ++j) lp[j] = l[perm[j]];
        const auto pp = optimal_distribution(lp).probabilities;
        const double c = 0.001 + 1000.0 * uniform01(rng);
        std::vector<double> ls(l);
        for (double& v : ls) v *= c;
        const auto ps = optimal_distribution(ls).probabilities;
        for (std::size_t j = 0; j < n; ++j) {
            worst_perm = std::max(worst_perm, std::abs(pp[j] - p[perm[j]]));
            worst_scale = std::max(worst_scale, std::abs(ps[j] - p[j]));
        }
        if (worst_sum > 1e-12 || worst_perm > 1e-12 || worst_scale > 1e-12)
            return fail(name, "sum err " + fmt(worst_sum) + ", perm err " + fmt(worst_perm) + ", scale err " +
                                  fmt(worst_scale),
                        {{"losses", l}, {"scale", c}});
    }
    return pass(name, "max |sum-1| " + fmt(worst_sum) + ", perm err " + fmt(worst_perm) + ", scale err " +
                          fmt(worst_scale));
}

double weighted_sum(const std::vector<double>& l, const double* p) {
    double m = 0.0;
    for (std::size_t j = 0; j < l.size(); ++j) m += l[j] / p[j];
    return m;
}

CheckResult check_simplex_optimality(std::uint64_t seed) {
    const char* name = "optimal_distribution_simplex_grid";
    Rng rng = make_rng(seed, 13);
    double worst_margin = INFINITY;
    for (int k = 0; k < 50; ++k) {
        std::vector<double> l = random_losses(rng, 3);
        for (double& v : l) v += 1e-3;
        const double best = m_p(l, optimal_distribution(l));
        // every grid point with step 0.01 in the open simplex
        for (int a = 1; a < 100; ++a) {
            for (int b = 1; a + b < 100; ++b) {
                const double p[3] = {a / 100.0, b / 100.0, (100 - a - b) / 100.0};
                const double v = weighted_sum(l, p);
                worst_margin = std::min(worst_margin, v - best);
                if (v < best - 1e-9)
                    return fail(name, "grid point beats the closed form", {{"losses", l}, {"p", p}});
            }
        }
        for (int r = 0; r < 1000; ++r) {
            const auto q = random_distribution(rng, 3);
            const double v = weighted_sum(l, q.probabilities.data());
            worst_margin = std::min(worst_margin, v - best);
            if (v < best - 1e-9)
                return fail(name, "random distribution beats the closed form",
                            {{"losses", l}, {"p", q.probabilities}});
        }
    }
    return pass(name, "50 loss vectors, min(M_grid - M_opt) = " + fmt(worst_margin));
}

CheckResult check_draw_marginals(std::size_t trials, std::uint64_t seed) {
    const char* name = "draw_queries_marginals";
    if (trials < kMinVerifyTrials) return skip(name, trials, kMinVerifyTrials);
    const QueryDistribution dist{{0.1, 0.2, 0.3, 0.15, 0.25}, 0.0};
    PoolState pool;
    pool.unlabeled = {0, 1, 2, 3, 4};
    std::vector<double> counts(5, 0.0);
    for (std::size_t k = 0; k < trials; ++k) {
        const auto plan = draw_queries(dist, pool, 1, mix_seed(seed, k));
        counts[plan.queried.front().pool_index] += 1.0;
    }
    double chi2 = 0.0;
    for (std::size_t j = 0; j < 5; ++j) {
        const double expected = dist.probabilities[j] * static_cast<double>(trials);
        chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
    }
    // 99.9% quantile of chi-square with 4 degrees of freedom
    constexpr double critical = 18.467;
    if (chi2 > critical)
        return fail(name, "chi2 = " + fmt(chi2) + " > " + fmt(critical),
                    {{"p", dist.probabilities}, {"trials", trials}, {"seed", seed}});
    return pass(name, "chi2(4 dof) = " + fmt(chi2) + " over " + std::to_string(trials) + " draws");
}

// ---- bounds suite ---------------------------------------------------------

CheckResult check_cauchy_schwarz(std::uint64_t seed) {
    const char* name = "cauchy_schwarz_identity";
    Rng rng = make_rng(seed, 21);
    double worst_rel = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 1000);
        const auto l = random_losses(rng, n);
        const double opt = m_p(l, optimal_distribution(l));
        double root_sum = 0.0;
        for (double v : l) root_sum += std::sqrt(v);
        const double identity = root_sum * root_sum;
        const double rel = std::abs(opt - identity) / identity;
        worst_rel = std::max(worst_rel, rel);
        const double uni = m_p(l, uniform_distribution(n));
        if (rel > 1e-10 || opt > uni)
            return fail(name, "rel err " + fmt(rel) + ", M_opt " + fmt(opt) + ", M_unif " + fmt(uni),
                        {{"losses", l}});
    }
    return pass(name, "1000 vectors, max rel err " + fmt(worst_rel) + ", M_opt <= M_unif throughout");
}

CheckResult check_c_delta() {
    const char* name = "c_delta_shape";
    double prev = INFINITY;
    for (double d = 0.001; d < 0.9995; d += 0.001) {
        const double c = c_delta(d);
        if (!(c < prev) || c < 1.0)
            return fail(name, "c_delta not decreasing or below 1 at delta " + fmt(d), {{"delta", d}});
        prev = c;
    }
    const double near_one = c_delta(0.999);
    if (!(near_one < 1.2)) return fail(name, "c_delta(0.999) = " + fmt(near_one), {{"delta", 0.999}});
    return pass(name, "decreasing on (0,1), c_delta(0.05) = " + fmt(c_delta(0.05)) + ", c_delta(0.999) = " +
                          fmt(near_one));
}

CheckResult check_variance(std::size_t trials, std::uint64_t seed) {
    const char* name = "estimator_variance_monte_carlo";
    constexpr std::size_t needed = 10000;
    if (trials < needed) return skip(name, trials, needed);
    double worst = 0.0;
    std::uint64_t stream = 0;
    for (double p : {0.1, 0.5, 0.9}) {
        for (double l : {0.5, 2.0}) {
            const std::vector<double> losses{l};
            const QueryDistribution dist{{p}, 0.0};
            const auto s = simulate_estimator(losses, dist, trials, mix_seed(seed, 300 + stream++));
            const double expected = estimator_variance(l, p);
            const double rel = std::abs(s.per_point_empirical_variance[0] - expected) / expected;
            worst = std::max(worst, rel);
            if (rel > 0.05)
                return fail(name, "empirical " + fmt(s.per_point_empirical_variance[0]) + " vs " + fmt(expected),
                            {{"l", l}, {"p", p}, {"trials", trials}, {"seed", seed}});
        }
    }
    return pass(name, "max relative deviation " + fmt(worst) + " (tolerance 0.05)");
}

CheckResult check_unbiased(std::size_t trials, std::uint64_t seed) {
    const char* name = "weighted_mean_unbiased";
    if (trials < kMinVerifyTrials) return skip(name, trials, kMinVerifyTrials);
    Rng rng = make_rng(seed, 22);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const std::size_t n = 2 + static_cast<std::size_t>(uniform01(rng) * 19);
        const auto l = random_losses(rng, n);
        const auto dist = random_distribution(rng, n);
        const auto s = simulate_estimator(l, dist, trials, mix_seed(seed, 400 + static_cast<std::uint64_t>(k)));
        const double se = s.weighted_mean_std / std::sqrt(static_cast<double>(trials));
        const double z = se > 0 ? s.empirical_mean_gap / se : 0.0;
        worst = std::max(worst, z);
        if (s.empirical_mean_gap > 3.0 * se)
            return fail(name, "gap " + fmt(s.empirical_mean_gap) + " > 3 SE " + fmt(3 * se),
                        {{"losses", l}, {"p", dist.probabilities}, {"trials", trials}});
    }
    return pass(name, "20 instances, max gap " + fmt(worst) + " standard errors");
}

CheckResult check_bernstein(std::size_t trials, std::uint64_t seed) {
    const char* name = "bernstein_coverage";
    if (trials < kMinVerifyTrials) return skip(name, trials, kMinVerifyTrials);
    Rng rng = make_rng(seed, 23);
    std::ostringstream detail;
    for (int k = 0; k < 5; ++k) {
        const std::size_t n = 5 + static_cast<std::size_t>(uniform01(rng) * 46);
        const auto l = random_losses(rng, n);
        const auto dist = random_distribution(rng, n);
        const double mp = m_p(l, dist);
        const double s_sum = variance_sum(l, dist);
        const double nd = static_cast<double>(n);
        const std::vector<double> eps{bernstein_level(mp, s_sum, 0.1) / nd, bernstein_level(mp, s_sum, 0.05) / nd};
        const auto sum = simulate_estimator(l, dist, trials, mix_seed(seed, 500 + static_cast<std::uint64_t>(k)), eps);
        const json instance{{"losses", l}, {"p", dist.probabilities}, {"trials", trials}};
        if (sum.max_abs_h > mp)
            return fail(name, "|H_j| = " + fmt(sum.max_abs_h) + " exceeds M_p = " + fmt(mp), instance);
        if (sum.second_moment_sum > mp * mp)
            return fail(name, "sum E[H^2] = " + fmt(sum.second_moment_sum) + " exceeds M_p^2", instance);
        const double deltas[2] = {0.1, 0.05};
        for (int e = 0; e < 2; ++e) {
            const double allowance = 3.0 * std::sqrt(deltas[e] * (1 - deltas[e]) / static_cast<double>(trials));
            if (sum.tail_exceed_fraction[e] > deltas[e] + allowance)
                return fail(name, "tail fraction " + fmt(sum.tail_exceed_fraction[e]) + " at delta " +
                                      fmt(deltas[e]),
                            instance);
        }
        if (k == 0)
            detail << "tail fractions " << fmt(sum.tail_exceed_fraction[0]) << " (delta 0.1), "
                   << fmt(sum.tail_exceed_fraction[1]) << " (delta 0.05); ";
    }
    detail << "|H_j| <= M_p and sum E[H^2] <= M_p^2 on 5 instances";
    return pass(name, detail.str());
}

}  // namespace

VerifySuite parse_verify_suite(std::string_view name) {
    if (name == "sampling") return VerifySuite::Sampling;
    if (name == "bounds") return VerifySuite::Bounds;
    if (name == "all") return VerifySuite::All;
    throw InvalidInput("unknown suite '" + std::string(name) + "' (expected sampling, bounds or all)");
}

bool VerifyReport::passed() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

std::string VerifyReport::render() const {
    std::ostringstream out;
    std::size_t failed = 0, skipped = 0;
    for (const auto& c : checks) {
        const char* tag = c.status == CheckStatus::Pass ? "[PASS]" : c.status == CheckStatus::Fail ? "[FAIL]" : "[SKIP]";
        out << tag << ' ' << c.name << ": " << c.detail << '\n';
        if (c.status == CheckStatus::Fail) {
            ++failed;
            out << "  replay: " << c.replay << '\n';
        }
        if (c.status == CheckStatus::Skipped) ++skipped;
    }
    out << checks.size() - failed - skipped << " passed, " << failed << " failed, " << skipped << " skipped\n";
    return out.str();
}

VerifyReport run_verify(VerifySuite suite, std::size_t trials, std::uint64_t seed) {
    VerifyReport report;
    if (suite == VerifySuite::Sampling || suite == VerifySuite::All) {
        report.checks.push_back(check_dominance(seed));
        report.checks.push_back(check_distribution_shape(seed));
        report.checks.push_back(check_simplex_optimality(seed));
        report.checks.push_back(check_draw_marginals(trials, seed));
    }
    if (suite == VerifySuite::Bounds || suite == VerifySuite::All) {
        report.checks.push_back(check_cauchy_schwarz(seed));
        report.checks.push_back(check_c_delta());
        report.checks.push_back(check_variance(trials, seed));
        report.checks.push_back(check_unbiased(trials, seed));
        report.checks.push_back(check_bernstein(trials, seed));
    }
    return report;
}

}  // namespace alis
