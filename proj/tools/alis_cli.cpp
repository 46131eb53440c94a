// alis: run importance-sampled active-learning experiments and verify the bound machinery.
//
//   alis run --config <path> [--out <dir>] [--workers N]
//   alis verify --suite sampling|bounds|all [--trials N] [--seed S] [--out <dir>]
//
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration or arguments,
// 3 training divergence, 4 other runtime errors.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "alis/experiment.hpp"
#include "alis/verify.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitRuntime = 4;

std::filesystem::path default_output_dir() {
    if (const char* env = std::getenv("ALIS_OUTPUT_DIR"); env && *env) return env;
    return "alis_out";
}

int cmd_run(const std::string& config_path, const std::string& out_flag, std::size_t workers_flag) {
    alis::ExperimentConfig config;
    try {
        config = alis::load_experiment_config(config_path);
    } catch (const alis::Error& e) {
        std::cerr << "alis run: invalid config: " << e.what() << '\n';
        return kExitConfig;
    }
    std::filesystem::path out = !out_flag.empty()  ? std::filesystem::path(out_flag)
                                : config.output_dir ? *config.output_dir
                                                    : default_output_dir();
    const std::size_t workers = workers_flag ? workers_flag : config.workers;
    try {
        const auto art = alis::run_experiment(config, out, workers);
        std::size_t rows = 0;
        for (const auto& r : art.runs) rows += r.result.records.size();
        std::cout << "wrote " << art.metrics.string() << " (" << rows << " rows) and "
                  << art.manifest.string() << '\n';
        for (const auto& r : art.runs) {
            if (r.result.stop_reason != alis::StopReason::Completed)
                std::cout << "note: " << alis::to_string(r.strategy) << " seed " << r.seed << " stopped early ("
                          << alis::to_string(r.result.stop_reason) << ")\n";
        }
        return 0;
    } catch (const alis::ExperimentDivergence& e) {
        std::cerr << "alis run: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const alis::ConfigError& e) {
        std::cerr << "alis run: invalid config: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "alis run: " << e.what() << '\n';
        return kExitRuntime;
    }
}

int cmd_verify(const std::string& suite_name, std::size_t trials, std::uint64_t seed, const std::string& out_flag) {
    alis::VerifySuite suite;
    try {
        suite = alis::parse_verify_suite(suite_name);
    } catch (const alis::Error& e) {
        std::cerr << "alis verify: " << e.what() << '\n';
        return kExitConfig;
    }
    try {
        const auto report = alis::run_verify(suite, trials, seed);
        const std::string text = report.render();
        std::cout << text;
        const std::filesystem::path out = out_flag.empty() ? default_output_dir() : std::filesystem::path(out_flag);
        std::filesystem::create_directories(out);
        std::ofstream(out / "verify_report.txt") << text;
        return report.passed() ? 0 : kExitVerifyFailed;
    } catch (const std::exception& e) {
        std::cerr << "alis verify: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active learning with importance-sampled queries"};
    app.require_subcommand(1);

    std::string config_path, run_out;
    std::size_t workers = 0;
    auto* run = app.add_subcommand("run", "Run every (strategy, seed) pair of an experiment config");
    run->add_option("--config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", run_out, "Output directory (overrides config and ALIS_OUTPUT_DIR)");
    run->add_option("--workers", workers, "Concurrent runs (overrides config)")->check(CLI::PositiveNumber);

    std::string suite = "all", verify_out;
    std::size_t trials = alis::kDefaultVerifyTrials;
    std::uint64_t seed = 0;
    auto* verify = app.add_subcommand("verify", "Check the sampling and bound properties by simulation");
    verify->add_option("--suite", suite, "sampling, bounds or all")->required();
    verify->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    verify->add_option("--seed", seed, "Random seed");
    verify->add_option("--out", verify_out, "Directory for verify_report.txt");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (*run) return cmd_run(config_path, run_out, workers);
    return cmd_verify(suite, trials, seed, verify_out);
}
