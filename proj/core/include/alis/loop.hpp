#pragma once

// The active-learning loop: pseudo-losses -> query distribution -> draw -> oracle -> retrain,
// with a bound report for every iteration.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "alis/bounds.hpp"
#include "alis/core.hpp"
#include "alis/error.hpp"
#include "alis/sampling.hpp"

namespace alis {

// Simulated label source backed by the dataset's ground truth.
class Oracle {
public:
    explicit Oracle(std::vector<Label> hidden_labels, std::optional<std::size_t> budget = std::nullopt);

    // Returns the true label. Repeated queries for an index are free. Throws BudgetExhausted when
    // a new index is requested with the budget spent.
    Label query(Index i);

    // Number of new indices that can still be served; unlimited when no budget is set.
    std::size_t remaining() const noexcept;
    std::size_t queries_served() const noexcept { return served_.size(); }
    std::optional<std::size_t> budget() const noexcept { return budget_; }

private:
    std::vector<Label> labels_;
    std::optional<std::size_t> budget_;
    std::unordered_set<Index> served_;
};

enum class Strategy { Optimal, Uniform };
// Cumulative retrains on all of S^{t+1}; PaperLiteral retrains on V^t alone.
enum class TrainingMode { Cumulative, PaperLiteral };

std::string_view to_string(Strategy s);
std::string_view to_string(TrainingMode m);
Strategy parse_strategy(std::string_view name);
TrainingMode parse_training_mode(std::string_view name);

struct LoopConfig {
    std::size_t iterations = 20;
    std::size_t batch_size = 10;             // m_t when batch_sizes is empty
    std::vector<std::size_t> batch_sizes;    // per-iteration m_t, length >= iterations when set
    Strategy strategy = Strategy::Optimal;
    TrainingMode training_mode = TrainingMode::Cumulative;
    double smoothing_gamma = 0.01;
    double delta = 0.05;
    LossKind loss_kind = LossKind::Squared;
    TrainConfig train_config;
    std::uint64_t seed = 0;
    double holdout_fraction = 0.2;
    std::optional<std::size_t> oracle_budget;

    std::size_t batch_size_at(std::size_t t) const;  // t is 1-based
    void validate() const;
};

struct IterationRecord {
    std::size_t iteration = 0;
    std::size_t n_t = 0;          // |U^t| before the draw
    std::size_t n_next = 0;       // |U^{t+1}|
    std::size_t labels_used = 0;  // |S^{t+1}|
    LinearModel model;            // A^t, the model the bound and the query distribution use
    QueryPlan plan;
    BoundReport active;   // m_p under the strategy's unsmoothed distribution
    BoundReport uniform;  // comparator: m_p under uniform
    double m_p_star = 0.0;      // under the unsmoothed optimal distribution, for any strategy
    double m_p_sampling = 0.0;  // under the distribution actually drawn from
    std::optional<double> holdout_loss;      // of A^{t+1}
    std::optional<double> holdout_accuracy;  // of A^{t+1}
    bool train_converged = true;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

enum class StopReason { Completed, PoolExhausted, BudgetExhausted };
std::string_view to_string(StopReason r);

struct RunResult {
    std::vector<IterationRecord> records;
    LinearModel final_model;
    PoolState final_pool;
    std::vector<Index> holdout;
    StopReason stop_reason = StopReason::Completed;
};

// Thrown when retraining diverges; carries the loop iteration alongside the optimizer's.
class LoopDivergence : public Error {
public:
    LoopDivergence(std::size_t loop_iteration, const Divergence& cause);
    std::size_t loop_iteration() const noexcept { return loop_iteration_; }

private:
    std::size_t loop_iteration_;
};

// Runs the loop for config.iterations rounds starting from the labeled seed set. Deterministic in
// config.seed. Stops early, without error, when the pool or the oracle budget runs out.
RunResult run_alis(const Dataset& data, std::span<const Index> seed_labeled, const LoopConfig& config);

struct HoldoutMetrics {
    double loss = 0.0;
    double accuracy = 0.0;
};
HoldoutMetrics evaluate(const LinearModel& model, const Dataset& data, std::span<const Index> indices,
                        LossKind kind);

}  // namespace alis
