#pragma once

// Experiment harness: configuration, (strategy, seed) sweeps and the metrics/manifest artifacts.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "alis/data.hpp"
#include "alis/loop.hpp"

namespace alis {

struct FileSource {
    std::filesystem::path path;
    DataFormat format = DataFormat::Csv;
};

struct ExperimentConfig {
    std::variant<SyntheticSpec, FileSource> dataset;
    std::size_t seed_labeled = 20;  // |S^0|
    LoopConfig loop;                // strategy and seed are overridden per run
    std::vector<Strategy> strategies{Strategy::Optimal, Strategy::Uniform};
    std::vector<std::uint64_t> seeds{0};
    std::optional<std::filesystem::path> output_dir;
    std::size_t workers = 1;

    void validate() const;
};

// Raised for malformed or invalid configuration files.
class ConfigError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Parses a JSON config. Unknown keys and out-of-range values raise ConfigError. Relative dataset
// paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// The config with every default filled in, as pretty-printed JSON accepted by the parser.
std::string resolved_config_json(const ExperimentConfig& config);

// Class-balanced random choice of `count` seed indices (half from each class where possible).
std::vector<Index> select_seed_labeled(const Dataset& data, std::size_t count, std::uint64_t seed);

Dataset load_experiment_dataset(const ExperimentConfig& config);

inline constexpr std::string_view kMetricsHeader =
    "strategy,seed,t,n_t,m_p_star,m_q,c_delta,bound_term,mean_pseudo_loss,holdout_loss,"
    "holdout_accuracy,labels_used";

struct RunSummary {
    Strategy strategy = Strategy::Optimal;
    std::uint64_t seed = 0;
    RunResult result;
};

// Retraining diverged inside one (strategy, seed) run.
class ExperimentDivergence : public Error {
public:
    ExperimentDivergence(Strategy strategy, std::uint64_t seed, std::size_t iteration,
                         const std::string& cause);
    Strategy strategy() const noexcept { return strategy_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t iteration() const noexcept { return iteration_; }

private:
    Strategy strategy_;
    std::uint64_t seed_;
    std::size_t iteration_;
};

// Runs every (strategy, seed) pair, `workers` at a time. Output is sorted by (strategy, seed)
// and does not depend on scheduling.
std::vector<RunSummary> run_sweep(const Dataset& data, const ExperimentConfig& config, std::size_t workers);

// Rows of metrics.csv (header included) for a finished sweep.
std::string render_metrics_csv(std::span<const RunSummary> runs);

struct ExperimentArtifacts {
    std::filesystem::path metrics;
    std::filesystem::path manifest;
    std::vector<std::filesystem::path> records;
    std::vector<RunSummary> runs;
};

// Writes metrics.csv, records/<strategy>_<seed>.jsonl and manifest.json into out_dir.
ExperimentArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                   std::size_t workers);

std::string sha256_hex(std::string_view bytes);

}  // namespace alis
