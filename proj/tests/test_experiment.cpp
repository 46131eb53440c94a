#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "alis/experiment.hpp"
#include "alis/verify.hpp"
#include "json.hpp"

namespace alis {
namespace {

namespace fs = std::filesystem;

constexpr const char* kMinimalConfig = R"({
  "dataset": {"synthetic": {"generator": "two_gaussians", "n": 200, "d": 2, "seed": 3}},
  "seed_labeled": 10,
  "loop": {"iterations": 2, "batch_size": 5},
  "strategies": ["optimal"],
  "seeds": [4]
})";

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "alis_experiment_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

TEST(Config, ParsesMinimalConfigWithDefaults) {
    const auto c = parse_experiment_config(kMinimalConfig);
    const auto& spec = std::get<SyntheticSpec>(c.dataset);
    EXPECT_EQ(spec.n, 200u);
    EXPECT_EQ(c.seed_labeled, 10u);
    EXPECT_EQ(c.loop.iterations, 2u);
    EXPECT_EQ(c.loop.loss_kind, LossKind::Squared);
    EXPECT_EQ(c.loop.smoothing_gamma, 0.01);
    EXPECT_EQ(c.loop.holdout_fraction, 0.2);
    EXPECT_EQ(c.loop.train_config.l2_regularization, 1e-4);
    EXPECT_EQ(c.strategies, std::vector<Strategy>{Strategy::Optimal});
}

TEST(Config, ResolvedConfigReparsesToTheSameConfig) {
    const auto c = parse_experiment_config(kMinimalConfig);
    const std::string resolved = resolved_config_json(c);
    EXPECT_EQ(resolved_config_json(parse_experiment_config(resolved)), resolved);
}

TEST(Config, RejectsInvalidConfigs) {
    EXPECT_THROW(parse_experiment_config("{not json"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "bogus": 1})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"seeds": [1]})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "strategies": []})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "seeds": []})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "strategies": ["greedy"]})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "loop": {"delta": 2}})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {}}, "loop": {"iterations": "x"}})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"synthetic": {"covariance_scale": -1}}})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(R"({"dataset": {"file": {"path": "a.csv", "format": "xls"}}})"), ConfigError);
}

TEST(Config, RelativeFilePathsResolveAgainstConfigDirectory) {
    const auto c = parse_experiment_config(R"({"dataset": {"file": {"path": "d.svm", "format": "libsvm"}}})", "/data/x");
    const auto& f = std::get<FileSource>(c.dataset);
    EXPECT_EQ(f.path, fs::path("/data/x/d.svm"));
    EXPECT_EQ(f.format, DataFormat::Libsvm);
}

TEST(SeedSelection, BalancedAndDeterministic) {
    const auto data = generate({TwoGaussians{}, 300, 2, 2});
    const auto a = select_seed_labeled(data, 20, 7);
    EXPECT_EQ(a, select_seed_labeled(data, 20, 7));
    EXPECT_EQ(a.size(), 20u);
    std::size_t pos = 0;
    for (Index i : a) pos += data.label(i) > 0;
    EXPECT_EQ(pos, 10u);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
}

TEST(RunExperiment, MinimalConfigRowCount) {
    const auto dir = scratch("minimal");
    const auto art = run_experiment(parse_experiment_config(kMinimalConfig), dir, 1);
    const std::string csv = slurp(art.metrics);
    EXPECT_EQ(count_lines(csv), 1u + 2u * 1u);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kMetricsHeader);
    EXPECT_TRUE(fs::exists(dir / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir / "records" / "optimal_4.jsonl"));
}

TEST(RunExperiment, ByteIdenticalAcrossRunsAndWorkerCounts) {
    auto c = parse_experiment_config(kMinimalConfig);
    c.strategies = {Strategy::Uniform, Strategy::Optimal};
    c.seeds = {9, 2, 5};
    const auto a = run_experiment(c, scratch("det_a"), 1);
    const auto b = run_experiment(c, scratch("det_b"), 4);
    EXPECT_EQ(slurp(a.metrics), slurp(b.metrics));
    EXPECT_EQ(slurp(a.manifest), slurp(b.manifest));
    EXPECT_EQ(count_lines(slurp(a.metrics)), 1u + 2u * 6u);
    // sorted by (strategy, seed)
    ASSERT_EQ(a.runs.size(), 6u);
    EXPECT_EQ(a.runs.front().strategy, Strategy::Optimal);
    EXPECT_EQ(a.runs.front().seed, 2u);
    EXPECT_EQ(a.runs.back().strategy, Strategy::Uniform);
    EXPECT_EQ(a.runs.back().seed, 9u);
}

TEST(RunExperiment, OptimalRowsRespectRemark) {
    auto c = parse_experiment_config(kMinimalConfig);
    c.strategies = {Strategy::Optimal, Strategy::Uniform};
    c.loop.iterations = 5;
    const auto art = run_experiment(c, scratch("remark"), 2);
    std::istringstream csv(slurp(art.metrics));
    std::string line;
    std::getline(csv, line);
    std::size_t rows = 0;
    while (std::getline(csv, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        ASSERT_EQ(cells.size(), 12u);
        EXPECT_LE(std::stod(cells[4]), std::stod(cells[5])) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 10u);
}

TEST(RunExperiment, ManifestReplaysTheRun) {
    const auto dir = scratch("replay");
    const auto art = run_experiment(parse_experiment_config(kMinimalConfig), dir, 1);
    const auto manifest = nlohmann::json::parse(slurp(art.manifest));
    const auto replay_cfg = parse_experiment_config(manifest.at("config").dump());
    const auto replay = run_experiment(replay_cfg, scratch("replay_b"), 1);
    EXPECT_EQ(slurp(art.metrics), slurp(replay.metrics));
    EXPECT_EQ(manifest.at("artifacts").at("metrics.csv").at("sha256").get<std::string>(), sha256_hex(slurp(art.metrics)));
}

TEST(RunExperiment, TooManyQueriesIsConfigError) {
    auto c = parse_experiment_config(kMinimalConfig);
    c.loop.iterations = 100;
    EXPECT_THROW(run_experiment(c, scratch("too_many"), 1), ConfigError);
}

TEST(RunExperiment, DivergenceNamesStrategySeedAndIteration) {
    auto c = parse_experiment_config(kMinimalConfig);
    c.loop.train_config.step_size = 50.0;
    try {
        run_experiment(c, scratch("diverge"), 1);
        FAIL();
    } catch (const ExperimentDivergence& e) {
        EXPECT_EQ(e.strategy(), Strategy::Optimal);
        EXPECT_EQ(e.seed(), 4u);
        EXPECT_NE(std::string(e.what()).find("t=0"), std::string::npos);
    }
}

TEST(Sha256, KnownVector) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Verify, BoundsSuitePassesAtDefaultTrials) {
    const auto report = run_verify(VerifySuite::Bounds, kDefaultVerifyTrials, 0);
    EXPECT_TRUE(report.passed()) << report.render();
    for (const auto& c : report.checks) EXPECT_EQ(c.status, CheckStatus::Pass) << c.name;
}

TEST(Verify, FewTrialsSkipsMonteCarloChecks) {
    const auto report = run_verify(VerifySuite::Sampling, 10, 0);
    EXPECT_TRUE(report.passed());
    bool skipped = false;
    for (const auto& c : report.checks) {
        if (c.status == CheckStatus::Skipped) {
            skipped = true;
            EXPECT_NE(c.detail.find("insufficient trials"), std::string::npos);
        }
    }
    EXPECT_TRUE(skipped);
}

TEST(Verify, ReportTextIsDeterministic) {
    EXPECT_EQ(run_verify(VerifySuite::All, 5000, 3).render(), run_verify(VerifySuite::All, 5000, 3).render());
}

TEST(Verify, UnknownSuite) { EXPECT_THROW(parse_verify_suite("everything"), InvalidInput); }

#ifdef ALIS_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(ALIS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

TEST(Cli, ExitCodes) {
    const auto dir = scratch("cli");
    std::ofstream(dir / "ok.json") << kMinimalConfig;
    std::ofstream(dir / "bad.json") << R"({"dataset": {"synthetic": {}}, "strategies": []})";
    std::ofstream(dir / "diverge.json")
        << R"({"dataset": {"synthetic": {"n": 100}}, "loop": {"iterations": 1, "train": {"step_size": 50}}})";

    EXPECT_EQ(run_cli("run --config " + (dir / "ok.json").string() + " --out " + (dir / "out").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "out" / "metrics.csv"));
    EXPECT_EQ(run_cli("run --config " + (dir / "bad.json").string() + " --out " + (dir / "x").string()), 2);
    EXPECT_EQ(run_cli("run --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run_cli("run --config " + (dir / "diverge.json").string() + " --out " + (dir / "y").string()), 3);
    EXPECT_EQ(run_cli("verify --suite sampling --trials 10 --out " + (dir / "v").string()), 0);
    EXPECT_TRUE(fs::exists(dir / "v" / "verify_report.txt"));
    EXPECT_EQ(run_cli("verify --suite nonsense"), 2);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const auto dir = scratch("cli_env");
    std::ofstream(dir / "ok.json") << kMinimalConfig;
    const std::string cmd = "ALIS_OUTPUT_DIR=" + (dir / "env_out").string() + " " + ALIS_CLI_PATH +
                            " run --config " + (dir / "ok.json").string() + " > /dev/null 2>&1";
    EXPECT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    EXPECT_TRUE(fs::exists(dir / "env_out" / "metrics.csv"));
}
#endif

}  // namespace
}  // namespace alis
