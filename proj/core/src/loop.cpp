#include "alis/loop.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "alis/data.hpp"
#include "alis/rng.hpp"
#include "alis/train.hpp"

namespace alis {

Oracle::Oracle(std::vector<Label> hidden_labels, std::optional<std::size_t> budget)
    : labels_(std::move(hidden_labels)), budget_(budget) {}

Label Oracle::query(Index i) {
    if (i >= labels_.size()) throw InvalidInput("oracle: index " + std::to_string(i) + " out of range");
    if (!served_.contains(i)) {
        if (budget_ && served_.size() >= *budget_)
            throw BudgetExhausted("oracle budget of " + std::to_string(*budget_) + " queries is spent");
        served_.insert(i);
    }
    return labels_[i];
}

std::size_t Oracle::remaining() const noexcept {
    if (!budget_) return static_cast<std::size_t>(-1);
    return *budget_ > served_.size() ? *budget_ - served_.size() : 0;
}

std::string_view to_string(Strategy s) { return s == Strategy::Optimal ? "optimal" : "uniform"; }

std::string_view to_string(TrainingMode m) {
    return m == TrainingMode::Cumulative ? "cumulative" : "paper_literal";
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::Completed: return "completed";
        case StopReason::PoolExhausted: return "pool_exhausted";
        case StopReason::BudgetExhausted: return "budget_exhausted";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "optimal") return Strategy::Optimal;
    if (name == "uniform") return Strategy::Uniform;
    throw InvalidInput("unknown strategy '" + std::string(name) + "'");
}

TrainingMode parse_training_mode(std::string_view name) {
    if (name == "cumulative") return TrainingMode::Cumulative;
    if (name == "paper_literal") return TrainingMode::PaperLiteral;
    throw InvalidInput("unknown training mode '" + std::string(name) + "'");
}

std::size_t LoopConfig::batch_size_at(std::size_t t) const {
    if (!batch_sizes.empty()) return batch_sizes.at(t - 1);
    return batch_size;
}

void LoopConfig::validate() const {
    if (batch_sizes.empty()) {
        if (iterations > 0 && batch_size == 0) throw InvalidInput("batch_size must be at least 1");
    } else {
        if (batch_sizes.size() < iterations)
            throw InvalidInput("batch_sizes has fewer entries than iterations");
        for (std::size_t m : batch_sizes)
            if (m == 0) throw InvalidInput("every batch size must be at least 1");
    }
    if (!(smoothing_gamma >= 0.0 && smoothing_gamma < 1.0))
        throw InvalidInput("smoothing_gamma must lie in [0, 1)");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0))
        throw InvalidInput("holdout_fraction must lie in [0, 1)");
    train_config.validate();
}

LoopDivergence::LoopDivergence(std::size_t loop_iteration, const Divergence& cause)
    : Error("retraining diverged at loop iteration " + std::to_string(loop_iteration) + ": " +
            cause.what()),
      loop_iteration_(loop_iteration) {}

HoldoutMetrics evaluate(const LinearModel& model, const Dataset& data, std::span<const Index> indices,
                        LossKind kind) {
    HoldoutMetrics m;
    if (indices.empty()) return m;
    std::size_t correct = 0;
    for (Index i : indices) {
        const double f = score(model, data.row(i));
        m.loss += loss(kind, data.label(i), f);
        if ((f >= 0.0 ? 1 : -1) == data.label(i)) ++correct;
    }
    const double n = static_cast<double>(indices.size());
    m.loss /= n;
    m.accuracy = static_cast<double>(correct) / n;
    return m;
}

namespace {

LinearModel retrain(const Dataset& data, std::span<const LabeledPoint> points,
                    const std::vector<Label>& known, const LoopConfig& config, std::size_t t,
                    bool* converged) {
    std::vector<WeightedPoint> train;
    train.reserve(points.size());
    for (const auto& p : points) train.push_back({data.row(p.index), known[p.index], p.acquisition_weight});
    try {
        TrainResult r = train_weighted(train, config.loss_kind, config.train_config);
        if (converged) *converged = r.converged;
        return std::move(r.model);
    } catch (const Divergence& e) {
        throw LoopDivergence(t, e);
    }
}

}  // namespace

RunResult run_alis(const Dataset& data, std::span<const Index> seed_labeled, const LoopConfig& config) {
    config.validate();
    if (seed_labeled.empty()) throw InvalidInput("run_alis: the seed labeled set is empty");

    const std::size_t n = data.size();
    std::vector<char> in_seed(n, 0);
    for (Index i : seed_labeled) {
        if (i >= n) throw InvalidInput("run_alis: seed index " + std::to_string(i) + " out of range");
        if (in_seed[i]) throw InvalidInput("run_alis: seed index " + std::to_string(i) + " repeated");
        in_seed[i] = 1;
    }

    std::vector<Index> candidates;
    candidates.reserve(n - seed_labeled.size());
    for (Index i = 0; i < n; ++i)
        if (!in_seed[i]) candidates.push_back(i);

    RunResult result;
    PoolState& pool = result.final_pool;
    if (candidates.empty()) {
        pool.unlabeled.clear();
    } else {
        HoldoutSplit split = split_holdout(data, candidates, config.holdout_fraction, mix_seed(config.seed, 1));
        pool.unlabeled = std::move(split.train);
        result.holdout = std::move(split.holdout);
    }

    // Seed labels are given up front and do not count against the oracle budget.
    std::vector<Label> known(n, 0);
    for (Index i : seed_labeled) {
        pool.labeled.push_back({i, 1.0});
        known[i] = data.label(i);
    }
    Oracle oracle({data.labels().begin(), data.labels().end()}, config.oracle_budget);

    LinearModel model = retrain(data, pool.labeled, known, config, 0, nullptr);

    for (std::size_t t = 1; t <= config.iterations; ++t) {
        if (pool.unlabeled.empty()) {
            result.stop_reason = StopReason::PoolExhausted;
            break;
        }
        const std::size_t n_t = pool.unlabeled.size();
        const std::size_t m = std::min(config.batch_size_at(t), n_t);

        const std::vector<double> losses = pseudo_losses(config.loss_kind, model, data, pool.unlabeled);
        const QueryDistribution optimal = optimal_distribution(losses);
        const QueryDistribution uniform = uniform_distribution(n_t);
        const QueryDistribution& target = config.strategy == Strategy::Optimal ? optimal : uniform;
        const QueryDistribution sampling =
            config.strategy == Strategy::Optimal ? smooth(optimal, config.smoothing_gamma) : uniform;

        std::optional<double> proxy;
        if (!result.holdout.empty()) {
            const double mean_pseudo = [&] {
                double s = 0.0;
                for (double l : losses) s += l;
                return s / static_cast<double>(n_t);
            }();
            proxy = std::abs(evaluate(model, data, result.holdout, config.loss_kind).loss - mean_pseudo);
        }

        IterationRecord rec;
        rec.iteration = t;
        rec.n_t = n_t;
        rec.model = model;
        rec.active = make_bound_report(t, losses, target, config.delta, proxy);
        rec.uniform = make_bound_report(t, losses, uniform, config.delta, proxy);
        rec.m_p_star = m_p(losses, optimal);
        rec.m_p_sampling = m_p(losses, sampling);
        rec.plan = draw_queries(sampling, pool, m, mix_seed(config.seed, 1000 + t));

        if (oracle.remaining() < rec.plan.queried.size()) {
            result.stop_reason = StopReason::BudgetExhausted;
            break;
        }
        std::vector<LabeledPoint> batch;
        batch.reserve(rec.plan.queried.size());
        for (const auto& q : rec.plan.queried) {
            known[q.pool_index] = oracle.query(q.pool_index);
            batch.push_back({q.pool_index, q.importance_weight});
        }

        // S^{t+1} = S^t + V^t, U^{t+1} = U^t - V^t
        pool.labeled.insert(pool.labeled.end(), batch.begin(), batch.end());
        std::vector<Index> remaining;
        remaining.reserve(n_t - batch.size());
        std::size_t next = 0;
        for (Index i : pool.unlabeled) {
            if (next < batch.size() && batch[next].index == i) {
                ++next;
                continue;
            }
            remaining.push_back(i);
        }
        pool.unlabeled = std::move(remaining);
        pool.iteration = t;

        const std::span<const LabeledPoint> train_set =
            config.training_mode == TrainingMode::Cumulative ? std::span<const LabeledPoint>(pool.labeled)
                                                             : std::span<const LabeledPoint>(batch);
        model = retrain(data, train_set, known, config, t, &rec.train_converged);

        rec.n_next = pool.unlabeled.size();
        rec.labels_used = pool.labeled.size();
        if (!result.holdout.empty()) {
            const HoldoutMetrics hm = evaluate(model, data, result.holdout, config.loss_kind);
            rec.holdout_loss = hm.loss;
            rec.holdout_accuracy = hm.accuracy;
        }
        result.records.push_back(std::move(rec));
    }

    result.final_model = std::move(model);
    return result;
}

}  // namespace alis
