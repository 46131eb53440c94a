#include "alis/record_io.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "json.hpp"

namespace alis {

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

json to_json(const BoundReport& r) {
    return {{"iteration", r.iteration}, {"n_t", r.n_t},       {"m_p", r.m_p},
            {"m_q", r.m_q},             {"c_delta", r.c_delta}, {"delta", r.delta},
            {"bound_term", r.bound_term}, {"mean_pseudo_loss", r.mean_pseudo_loss},
            {"holdout_loss_proxy", opt(r.holdout_loss_proxy)}};
}

BoundReport bound_from_json(const json& j) {
    BoundReport r;
    r.iteration = j.at("iteration").get<std::size_t>();
    r.n_t = j.at("n_t").get<std::size_t>();
    r.m_p = j.at("m_p").get<double>();
    r.m_q = j.at("m_q").get<double>();
    r.c_delta = j.at("c_delta").get<double>();
    r.delta = j.at("delta").get<double>();
    r.bound_term = j.at("bound_term").get<double>();
    r.mean_pseudo_loss = j.at("mean_pseudo_loss").get<double>();
    r.holdout_loss_proxy = get_opt<double>(j, "holdout_loss_proxy");
    return r;
}

json to_json(const IterationRecord& r) {
    json queried = json::array();
    for (const auto& q : r.plan.queried)
        queried.push_back({q.pool_index, q.probability, q.importance_weight});
    return {{"iteration", r.iteration},
            {"n_t", r.n_t},
            {"n_next", r.n_next},
            {"labels_used", r.labels_used},
            {"model", {{"weights", r.model.weights}, {"bias", r.model.bias}}},
            {"plan", {{"queried", queried}, {"draw_count", r.plan.draw_count}, {"seed", r.plan.seed}}},
            {"active", to_json(r.active)},
            {"uniform", to_json(r.uniform)},
            {"m_p_star", r.m_p_star},
            {"m_p_sampling", r.m_p_sampling},
            {"holdout_loss", opt(r.holdout_loss)},
            {"holdout_accuracy", opt(r.holdout_accuracy)},
            {"train_converged", r.train_converged}};
}

IterationRecord record_from_json(const json& j) {
    IterationRecord r;
    r.iteration = j.at("iteration").get<std::size_t>();
    r.n_t = j.at("n_t").get<std::size_t>();
    r.n_next = j.at("n_next").get<std::size_t>();
    r.labels_used = j.at("labels_used").get<std::size_t>();
    r.model.weights = j.at("model").at("weights").get<std::vector<double>>();
    r.model.bias = j.at("model").at("bias").get<double>();
    const auto& plan = j.at("plan");
    for (const auto& q : plan.at("queried"))
        r.plan.queried.push_back({q.at(0).get<Index>(), q.at(1).get<double>(), q.at(2).get<double>()});
    r.plan.draw_count = plan.at("draw_count").get<std::size_t>();
    r.plan.seed = plan.at("seed").get<std::uint64_t>();
    r.active = bound_from_json(j.at("active"));
    r.uniform = bound_from_json(j.at("uniform"));
    r.m_p_star = j.at("m_p_star").get<double>();
    r.m_p_sampling = j.at("m_p_sampling").get<double>();
    r.holdout_loss = get_opt<double>(j, "holdout_loss");
    r.holdout_accuracy = get_opt<double>(j, "holdout_accuracy");
    r.train_converged = j.at("train_converged").get<bool>();
    return r;
}

}  // namespace

void write_records(std::ostream& out, std::span<const IterationRecord> records) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

std::vector<IterationRecord> read_records(std::istream& in) {
    std::vector<IterationRecord> out;
    std::string line;
    for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
        if (line.empty()) continue;
        try {
            out.push_back(record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(line_no, std::string("bad iteration record: ") + e.what());
        }
    }
    return out;
}

}  // namespace alis
