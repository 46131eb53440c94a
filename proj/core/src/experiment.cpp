#include "alis/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <thread>

#include "alis/record_io.hpp"
#include "alis/rng.hpp"
#include "json.hpp"

namespace alis {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where) {
    if (!obj.is_object()) throw ConfigError(std::string(where) + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
    }
}

template <class T>
void read(const json& obj, const char* key, T& out, std::string_view where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + "." + key + " has the wrong type");
    }
}

SyntheticSpec parse_synthetic(const json& j) {
    SyntheticSpec spec;
    std::string generator = "two_gaussians";
    read(j, "generator", generator, "dataset.synthetic");
    if (generator == "two_gaussians") {
        check_keys(j, {"generator", "n", "d", "seed", "mean_separation", "covariance_scale", "class_balance"},
                   "dataset.synthetic");
        TwoGaussians g;
        read(j, "mean_separation", g.mean_separation, "dataset.synthetic");
        read(j, "covariance_scale", g.covariance_scale, "dataset.synthetic");
        read(j, "class_balance", g.class_balance, "dataset.synthetic");
        if (!(g.covariance_scale > 0.0)) throw ConfigError("dataset.synthetic.covariance_scale must be positive");
        if (!(g.class_balance > 0.0 && g.class_balance < 1.0))
            throw ConfigError("dataset.synthetic.class_balance must lie in (0, 1)");
        spec.generator = g;
    } else if (generator == "linear_margin") {
        check_keys(j, {"generator", "n", "d", "seed", "label_noise_rate"}, "dataset.synthetic");
        LinearMargin m;
        read(j, "label_noise_rate", m.label_noise_rate, "dataset.synthetic");
        if (!(m.label_noise_rate >= 0.0 && m.label_noise_rate < 0.5))
            throw ConfigError("dataset.synthetic.label_noise_rate must lie in [0, 0.5)");
        spec.generator = m;
    } else {
        throw ConfigError("unknown generator '" + generator + "'");
    }
    read(j, "n", spec.n, "dataset.synthetic");
    read(j, "d", spec.d, "dataset.synthetic");
    read(j, "seed", spec.seed, "dataset.synthetic");
    if (spec.n == 0 || spec.d == 0) throw ConfigError("dataset.synthetic n and d must be positive");
    return spec;
}

TrainConfig parse_train(const json& j) {
    check_keys(j, {"max_iterations", "gradient_tolerance", "step_size", "l2_regularization", "seed"},
               "loop.train");
    TrainConfig c;
    read(j, "max_iterations", c.max_iterations, "loop.train");
    read(j, "gradient_tolerance", c.gradient_tolerance, "loop.train");
    read(j, "step_size", c.step_size, "loop.train");
    read(j, "l2_regularization", c.l2_regularization, "loop.train");
    read(j, "seed", c.seed, "loop.train");
    return c;
}

LoopConfig parse_loop(const json& j) {
    check_keys(j, {"iterations", "batch_size", "batch_sizes", "training_mode", "smoothing_gamma", "delta",
                   "loss", "holdout_fraction", "oracle_budget", "train"},
               "loop");
    LoopConfig c;
    read(j, "iterations", c.iterations, "loop");
    read(j, "batch_size", c.batch_size, "loop");
    read(j, "batch_sizes", c.batch_sizes, "loop");
    read(j, "smoothing_gamma", c.smoothing_gamma, "loop");
    read(j, "delta", c.delta, "loop");
    read(j, "holdout_fraction", c.holdout_fraction, "loop");
    if (j.contains("oracle_budget") && !j.at("oracle_budget").is_null()) {
        std::size_t budget = 0;
        read(j, "oracle_budget", budget, "loop");
        c.oracle_budget = budget;
    }
    std::string name;
    if (j.contains("training_mode")) {
        read(j, "training_mode", name, "loop");
        c.training_mode = parse_training_mode(name);
    }
    if (j.contains("loss")) {
        read(j, "loss", name, "loop");
        c.loss_kind = parse_loss_kind(name);
    }
    if (j.contains("train")) c.train_config = parse_train(j.at("train"));
    return c;
}

json synthetic_to_json(const SyntheticSpec& spec) {
    json j{{"n", spec.n}, {"d", spec.d}, {"seed", spec.seed}};
    if (const auto* g = std::get_if<TwoGaussians>(&spec.generator)) {
        j["generator"] = "two_gaussians";
        j["mean_separation"] = g->mean_separation;
        j["covariance_scale"] = g->covariance_scale;
        j["class_balance"] = g->class_balance;
    } else {
        j["generator"] = "linear_margin";
        j["label_noise_rate"] = std::get<LinearMargin>(spec.generator).label_noise_rate;
    }
    return j;
}

json config_to_json(const ExperimentConfig& c) {
    json dataset;
    if (const auto* s = std::get_if<SyntheticSpec>(&c.dataset)) {
        dataset["synthetic"] = synthetic_to_json(*s);
    } else {
        const auto& f = std::get<FileSource>(c.dataset);
        dataset["file"] = {{"path", f.path.string()}, {"format", std::string(to_string(f.format))}};
    }
    const LoopConfig& l = c.loop;
    const TrainConfig& t = l.train_config;
    json loop{{"iterations", l.iterations},
              {"batch_size", l.batch_size},
              {"batch_sizes", l.batch_sizes},
              {"training_mode", std::string(to_string(l.training_mode))},
              {"smoothing_gamma", l.smoothing_gamma},
              {"delta", l.delta},
              {"loss", std::string(to_string(l.loss_kind))},
              {"holdout_fraction", l.holdout_fraction},
              {"oracle_budget", l.oracle_budget ? json(*l.oracle_budget) : json(nullptr)},
              {"train",
               {{"max_iterations", t.max_iterations},
                {"gradient_tolerance", t.gradient_tolerance},
                {"step_size", t.step_size},
                {"l2_regularization", t.l2_regularization},
                {"seed", t.seed}}}};
    json strategies = json::array();
    for (Strategy s : c.strategies) strategies.push_back(std::string(to_string(s)));
    json j{{"dataset", dataset},       {"seed_labeled", c.seed_labeled}, {"loop", loop},
           {"strategies", strategies}, {"seeds", c.seeds},               {"workers", c.workers}};
    if (c.output_dir) j["output_dir"] = c.output_dir->string();
    return j;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
    if (strategies.empty()) throw ConfigError("at least one strategy is required");
    if (seeds.empty()) throw ConfigError("at least one seed is required");
    if (seed_labeled == 0) throw ConfigError("seed_labeled must be at least 1");
    if (workers == 0) throw ConfigError("workers must be at least 1");
    auto sorted = strategies;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ConfigError("strategies contain duplicates");
    auto seeds_sorted = seeds;
    std::sort(seeds_sorted.begin(), seeds_sorted.end());
    if (std::adjacent_find(seeds_sorted.begin(), seeds_sorted.end()) != seeds_sorted.end())
        throw ConfigError("seeds contain duplicates");
    try {
        loop.validate();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(std::string("loop: ") + e.what());
    }
}

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(j, {"dataset", "seed_labeled", "loop", "strategies", "seeds", "output_dir", "workers"}, "config");

    ExperimentConfig c;
    try {
        if (!j.contains("dataset")) throw ConfigError("config.dataset is required");
        const json& ds = j.at("dataset");
        check_keys(ds, {"synthetic", "file"}, "dataset");
        if (ds.size() != 1) throw ConfigError("dataset needs exactly one of 'synthetic' or 'file'");
        if (ds.contains("synthetic")) {
            c.dataset = parse_synthetic(ds.at("synthetic"));
        } else {
            const json& f = ds.at("file");
            check_keys(f, {"path", "format"}, "dataset.file");
            FileSource src;
            std::string path, format = "csv";
            read(f, "path", path, "dataset.file");
            read(f, "format", format, "dataset.file");
            if (path.empty()) throw ConfigError("dataset.file.path is required");
            src.path = std::filesystem::path(path);
            if (src.path.is_relative() && !base_dir.empty()) src.path = base_dir / src.path;
            src.format = parse_data_format(format);
            c.dataset = src;
        }
        read(j, "seed_labeled", c.seed_labeled, "config");
        if (j.contains("loop")) c.loop = parse_loop(j.at("loop"));
        if (j.contains("strategies")) {
            std::vector<std::string> names;
            read(j, "strategies", names, "config");
            c.strategies.clear();
            for (const auto& n : names) c.strategies.push_back(parse_strategy(n));
        }
        read(j, "seeds", c.seeds, "config");
        if (j.contains("output_dir")) {
            std::string dir;
            read(j, "output_dir", dir, "config");
            c.output_dir = dir;
        }
        read(j, "workers", c.workers, "config");
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_experiment_config(buf.str(), path.parent_path());
}

std::string resolved_config_json(const ExperimentConfig& config) { return config_to_json(config).dump(2); }

std::vector<Index> select_seed_labeled(const Dataset& data, std::size_t count, std::uint64_t seed) {
    if (count == 0 || count > data.size())
        throw InvalidInput("seed labeled count must lie in [1, n]");
    std::vector<Index> by_class[2];
    for (Index i = 0; i < data.size(); ++i) by_class[data.label(i) > 0 ? 1 : 0].push_back(i);
    for (int c = 0; c < 2; ++c) {
        Rng rng = make_rng(seed, 100 + static_cast<std::uint64_t>(c));
        auto& v = by_class[c];
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(v[i - 1], v[std::min(j, i - 1)]);
        }
    }
    std::size_t take_neg = std::min(count / 2, by_class[0].size());
    std::size_t take_pos = std::min(count - take_neg, by_class[1].size());
    take_neg = count - take_pos;
    std::vector<Index> out(by_class[0].begin(), by_class[0].begin() + take_neg);
    out.insert(out.end(), by_class[1].begin(), by_class[1].begin() + take_pos);
    std::sort(out.begin(), out.end());
    return out;
}

Dataset load_experiment_dataset(const ExperimentConfig& config) {
    if (const auto* s = std::get_if<SyntheticSpec>(&config.dataset)) return generate(*s);
    const auto& f = std::get<FileSource>(config.dataset);
    return load_dataset(f.path, f.format);
}

ExperimentDivergence::ExperimentDivergence(Strategy strategy, std::uint64_t seed, std::size_t iteration,
                                           const std::string& cause)
    : Error("run (strategy=" + std::string(to_string(strategy)) + ", seed=" + std::to_string(seed) +
            ", t=" + std::to_string(iteration) + ") diverged: " + cause),
      strategy_(strategy),
      seed_(seed),
      iteration_(iteration) {}

std::vector<RunSummary> run_sweep(const Dataset& data, const ExperimentConfig& config, std::size_t workers) {
    config.validate();
    std::size_t total_batch = 0;
    for (std::size_t t = 1; t <= config.loop.iterations; ++t) total_batch += config.loop.batch_size_at(t);
    if (config.seed_labeled >= data.size())
        throw ConfigError("seed_labeled must be smaller than the dataset size");
    if (total_batch > data.size() - config.seed_labeled)
        throw ConfigError("total queries " + std::to_string(total_batch) + " exceed the " +
                          std::to_string(data.size() - config.seed_labeled) + " unlabeled points");

    std::vector<RunSummary> runs;
    for (Strategy s : config.strategies)
        for (std::uint64_t seed : config.seeds) runs.push_back({s, seed, {}});
    std::sort(runs.begin(), runs.end(), [](const RunSummary& a, const RunSummary& b) {
        if (a.strategy != b.strategy) return to_string(a.strategy) < to_string(b.strategy);
        return a.seed < b.seed;
    });

    std::vector<std::exception_ptr> errors(runs.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < runs.size(); k = next++) {
            try {
                LoopConfig loop = config.loop;
                loop.strategy = runs[k].strategy;
                loop.seed = runs[k].seed;
                const auto seeds = select_seed_labeled(data, config.seed_labeled, runs[k].seed);
                runs[k].result = run_alis(data, seeds, loop);
            } catch (const LoopDivergence& e) {
                errors[k] = std::make_exception_ptr(
                    ExperimentDivergence(runs[k].strategy, runs[k].seed, e.loop_iteration(), e.what()));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const std::size_t pool = std::clamp<std::size_t>(workers, 1, runs.size());
    if (pool == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        for (std::size_t w = 0; w < pool; ++w) threads.emplace_back(work);
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return runs;
}

std::string render_metrics_csv(std::span<const RunSummary> runs) {
    std::ostringstream out;
    out << kMetricsHeader << '\n';
    for (const auto& run : runs) {
        for (const auto& r : run.result.records) {
            out << to_string(run.strategy) << ',' << run.seed << ',' << r.iteration << ',' << r.n_t << ','
                << format_double(r.m_p_star) << ',' << format_double(r.active.m_q) << ','
                << format_double(r.active.c_delta) << ',' << format_double(r.active.bound_term) << ','
                << format_double(r.active.mean_pseudo_loss) << ','
                << (r.holdout_loss ? format_double(*r.holdout_loss) : "") << ','
                << (r.holdout_accuracy ? format_double(*r.holdout_accuracy) : "") << ',' << r.labels_used
                << '\n';
        }
    }
    return out.str();
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

ExperimentArtifacts run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                   std::size_t workers) {
    const Dataset data = load_experiment_dataset(config);
    ExperimentArtifacts art;
    art.runs = run_sweep(data, config, workers);

    std::filesystem::create_directories(out_dir / "records");
    json artifacts = json::object();
    auto emit = [&](const std::filesystem::path& rel, const std::string& bytes) {
        const auto path = out_dir / rel;
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write " + path.string());
        f << bytes;
        if (!f) throw Error("failed writing " + path.string());
        artifacts[rel.generic_string()] = {{"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}};
        return path;
    };

    art.metrics = emit("metrics.csv", render_metrics_csv(art.runs));
    json runs = json::array();
    for (const auto& run : art.runs) {
        std::ostringstream rec;
        write_records(rec, run.result.records);
        const std::string name = std::string(to_string(run.strategy)) + "_" + std::to_string(run.seed) + ".jsonl";
        art.records.push_back(emit(std::filesystem::path("records") / name, rec.str()));
        runs.push_back({{"strategy", std::string(to_string(run.strategy))},
                        {"seed", run.seed},
                        {"iterations_completed", run.result.records.size()},
                        {"stop_reason", std::string(to_string(run.result.stop_reason))},
                        {"holdout_size", run.result.holdout.size()}});
    }

    json manifest{{"tool", "alis"},
                  {"format_version", 1},
                  {"config", config_to_json(config)},
                  {"dataset", {{"n", data.size()}, {"d", data.dim()}}},
                  {"runs", runs},
                  {"artifacts", artifacts}};
    art.manifest = out_dir / "manifest.json";
    std::ofstream m(art.manifest);
    m << manifest.dump(2) << '\n';
    if (!m) throw Error("failed writing " + art.manifest.string());
    return art;
}

}  // namespace alis
