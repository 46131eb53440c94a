#pragma once

// Dataset ingestion (CSV, LIBSVM), synthetic generators and stratified holdout splits.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "alis/core.hpp"

namespace alis {

enum class DataFormat { Csv, Libsvm };

DataFormat parse_data_format(std::string_view name);
std::string_view to_string(DataFormat format);

// CSV: one point per line, label in the last column as -1/+1 (0/1 also accepted).
// LIBSVM: "label idx:val ..." with 1-based indices, densified to d = max index.
// Blank lines and lines starting with '#' are skipped.
Dataset parse_csv(std::istream& in);
Dataset parse_libsvm(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path, DataFormat format);

// Features and labels with 17 significant digits, so parse_csv(write_csv(x)) == x.
void write_csv(std::ostream& out, const Dataset& data);

struct TwoGaussians {
    double mean_separation = 3.0;   // distance between the two class means
    double covariance_scale = 1.0;  // per-coordinate standard deviation
    double class_balance = 0.5;     // P(y = +1)
};

struct LinearMargin {
    double label_noise_rate = 0.0;  // probability of flipping the clean label, in [0, 0.5)
};

struct SyntheticSpec {
    std::variant<TwoGaussians, LinearMargin> generator = TwoGaussians{};
    std::size_t n = 1000;
    std::size_t d = 2;
    std::uint64_t seed = 0;
};

// TwoGaussians: y ~ 2 Bernoulli(balance) - 1, x ~ N(y (sep/2) u, sigma^2 I) with u = (1..1)/sqrt(d).
// LinearMargin: x ~ N(0, I), y = sign(w* . x) for a seeded unit w*, flipped with the noise rate.
Dataset generate(const SyntheticSpec& spec);

struct HoldoutSplit {
    std::vector<Index> train;    // sorted
    std::vector<Index> holdout;  // sorted
};

// Class-stratified split of `candidates`. The holdout gets round(fraction * |candidates|) points,
// apportioned between classes by largest remainder. Throws InvalidInput if the train side would be
// empty or fraction is outside [0, 1).
HoldoutSplit split_holdout(const Dataset& data, std::span<const Index> candidates, double fraction,
                           std::uint64_t seed);
HoldoutSplit split_holdout(const Dataset& data, double fraction, std::uint64_t seed);

}  // namespace alis
