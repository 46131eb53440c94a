#pragma once

// Domain types shared by every module: datasets, pools, linear models, losses.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace alis {

using Index = std::size_t;

// Binary label, always -1 or +1.
using Label = int;

// Dense n x d feature matrix (row-major) with labels in {-1, +1}.
class Dataset {
public:
    Dataset() = default;
    // Throws InvalidInput unless n >= 1, d >= 1, features are finite and labels are +-1.
    Dataset(std::vector<double> features, std::vector<Label> labels, std::size_t dim);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dim() const noexcept { return dim_; }
    std::span<const double> row(Index i) const { return {features_.data() + i * dim_, dim_}; }
    Label label(Index i) const { return labels_[i]; }
    std::span<const Label> labels() const noexcept { return labels_; }
    std::span<const double> features() const noexcept { return features_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<double> features_;
    std::vector<Label> labels_;
    std::size_t dim_ = 0;
};

// A labeled pool member. acquisition_weight is 1 for seed points and 1/p for queried points.
struct LabeledPoint {
    Index index = 0;
    double acquisition_weight = 1.0;

    friend bool operator==(const LabeledPoint&, const LabeledPoint&) = default;
};

// Partition of the non-holdout indices into the labeled set S^t and unlabeled set U^t.
struct PoolState {
    std::vector<LabeledPoint> labeled;
    std::vector<Index> unlabeled;  // sorted ascending
    std::size_t iteration = 0;

    std::size_t unlabeled_count() const noexcept { return unlabeled.size(); }
};

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    static LinearModel zero(std::size_t dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
    std::size_t dim() const noexcept { return weights.size(); }

    friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

enum class LossKind { Squared, Logistic, Hinge };

std::string_view to_string(LossKind kind);
// Accepts "squared", "logistic", "hinge". Throws InvalidInput otherwise.
LossKind parse_loss_kind(std::string_view name);

struct TrainConfig {
    std::size_t max_iterations = 20000;
    double gradient_tolerance = 1e-8;
    // In units of 1/L, L being a curvature bound of the objective. Values below 2 cannot diverge
    // for squared or logistic loss.
    double step_size = 1.0;
    double l2_regularization = 1e-4;
    // Full-batch descent from the zero model draws nothing; kept so manifests pin every knob.
    std::uint64_t seed = 0;

    // Throws InvalidInput on a non-positive tolerance, step or iteration cap, or negative l2.
    void validate() const;
};

// f(x) = weights . x + bias. Throws InvalidInput on dimension mismatch.
double score(const LinearModel& model, std::span<const double> x);

// l(y, f). Throws InvalidInput when y is not +-1 or f is not finite.
double loss(LossKind kind, Label y, double f);

// d l(y, f) / d f. The hinge kink at y*f = 1 uses the zero subgradient.
double loss_derivative(LossKind kind, Label y, double f);

}  // namespace alis
