#include "alis/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

#include "alis/error.hpp"
#include "alis/rng.hpp"

namespace alis {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

double parse_number(std::string_view token, std::size_t line_no) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size() || token.empty())
        throw ParseError(line_no, "cannot parse '" + std::string(token) + "' as a number");
    if (!std::isfinite(value)) throw ParseError(line_no, "non-finite value '" + std::string(token) + "'");
    return value;
}

Label parse_label(std::string_view token, std::size_t line_no) {
    const double v = parse_number(token, line_no);
    if (v == 1.0) return 1;
    if (v == -1.0 || v == 0.0) return -1;
    throw ParseError(line_no, "label '" + std::string(trim(token)) + "' is not one of -1, 0, 1");
}

}  // namespace

DataFormat parse_data_format(std::string_view name) {
    if (name == "csv") return DataFormat::Csv;
    if (name == "libsvm") return DataFormat::Libsvm;
    throw InvalidInput("unknown data format '" + std::string(name) + "'");
}

std::string_view to_string(DataFormat format) {
    return format == DataFormat::Csv ? "csv" : "libsvm";
}

Dataset parse_csv(std::istream& in) {
    std::vector<double> features;
    std::vector<Label> labels;
    std::size_t columns = 0;
    std::string raw;
    for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
        const std::string_view line = trim(raw);
        if (skippable(line)) continue;
        std::vector<std::string_view> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields.size() < 2)
            throw ParseError(line_no, "expected at least one feature and a label");
        if (columns == 0) {
            columns = fields.size();
        } else if (fields.size() != columns) {
            throw SchemaError(line_no, "row has " + std::to_string(fields.size()) +
                                           " columns, previous rows have " + std::to_string(columns));
        }
        for (std::size_t c = 0; c + 1 < fields.size(); ++c)
            features.push_back(parse_number(fields[c], line_no));
        labels.push_back(parse_label(fields.back(), line_no));
    }
    if (labels.empty()) throw ParseError(0, "no data rows");
    return Dataset(std::move(features), std::move(labels), columns - 1);
}

Dataset parse_libsvm(std::istream& in) {
    struct Row {
        Label label;
        std::vector<std::pair<std::size_t, double>> entries;
    };
    std::vector<Row> rows;
    std::size_t dim = 0;
    std::string raw;
    for (std::size_t line_no = 1; std::getline(in, raw); ++line_no) {
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        Row row{};
        bool first = true;
        std::size_t pos = 0;
        while (pos < line.size()) {
            const auto end = line.find_first_of(" \t", pos);
            const std::string_view token = line.substr(pos, end == std::string_view::npos ? end : end - pos);
            pos = end == std::string_view::npos ? line.size() : line.find_first_not_of(" \t", end);
            if (pos == std::string_view::npos) pos = line.size();
            if (first) {
                row.label = parse_label(token, line_no);
                first = false;
                continue;
            }
            const auto colon = token.find(':');
            if (colon == std::string_view::npos)
                throw ParseError(line_no, "expected idx:value, got '" + std::string(token) + "'");
            std::size_t idx = 0;
            const auto key = token.substr(0, colon);
            const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (ec != std::errc() || ptr != key.data() + key.size() || idx == 0)
                throw ParseError(line_no, "bad feature index '" + std::string(key) + "'");
            row.entries.emplace_back(idx, parse_number(token.substr(colon + 1), line_no));
            dim = std::max(dim, idx);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(0, "no data rows");
    if (dim == 0) throw ParseError(0, "no features in any row");

    std::vector<double> features(rows.size() * dim, 0.0);
    std::vector<Label> labels;
    labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (const auto& [idx, value] : rows[i].entries) features[i * dim + idx - 1] = value;
        labels.push_back(rows[i].label);
    }
    return Dataset(std::move(features), std::move(labels), dim);
}

Dataset load_dataset(const std::filesystem::path& path, DataFormat format) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open " + path.string());
    return format == DataFormat::Csv ? parse_csv(in) : parse_libsvm(in);
}

void write_csv(std::ostream& out, const Dataset& data) {
    const auto old_precision = out.precision(17);
    for (Index i = 0; i < data.size(); ++i) {
        for (double v : data.row(i)) out << v << ',';
        out << data.label(i) << '\n';
    }
    out.precision(old_precision);
}

Dataset generate(const SyntheticSpec& spec) {
    if (spec.n == 0 || spec.d == 0) throw InvalidInput("generate: n and d must be positive");
    Rng rng = make_rng(spec.seed, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> features(spec.n * spec.d);
    std::vector<Label> labels(spec.n);

    if (const auto* g = std::get_if<TwoGaussians>(&spec.generator)) {
        if (!(g->covariance_scale > 0.0)) throw InvalidInput("generate: covariance_scale must be positive");
        if (!(g->class_balance > 0.0 && g->class_balance < 1.0))
            throw InvalidInput("generate: class_balance must lie in (0, 1)");
        if (!std::isfinite(g->mean_separation)) throw InvalidInput("generate: mean_separation must be finite");
        const double offset = 0.5 * g->mean_separation / std::sqrt(static_cast<double>(spec.d));
        for (std::size_t i = 0; i < spec.n; ++i) {
            const Label y = uniform01(rng) < g->class_balance ? 1 : -1;
            labels[i] = y;
            for (std::size_t k = 0; k < spec.d; ++k)
                features[i * spec.d + k] = y * offset + g->covariance_scale * normal(rng);
        }
    } else {
        const auto& m = std::get<LinearMargin>(spec.generator);
        if (!(m.label_noise_rate >= 0.0 && m.label_noise_rate < 0.5))
            throw InvalidInput("generate: label_noise_rate must lie in [0, 0.5)");
        std::vector<double> direction(spec.d);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& w : direction) {
                w = normal(rng);
                norm += w * w;
            }
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        for (double& w : direction) w /= norm;
        for (std::size_t i = 0; i < spec.n; ++i) {
            double f = 0.0;
            for (std::size_t k = 0; k < spec.d; ++k) {
                const double v = normal(rng);
                features[i * spec.d + k] = v;
                f += direction[k] * v;
            }
            Label y = f >= 0.0 ? 1 : -1;
            if (uniform01(rng) < m.label_noise_rate) y = -y;
            labels[i] = y;
        }
    }
    return Dataset(std::move(features), std::move(labels), spec.d);
}

HoldoutSplit split_holdout(const Dataset& data, std::span<const Index> candidates, double fraction,
                           std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) throw InvalidInput("holdout fraction must lie in [0, 1)");
    const std::size_t n = candidates.size();
    const auto total = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (total >= n) throw InvalidInput("holdout fraction leaves no training points");

    std::vector<Index> by_class[2];
    for (Index i : candidates) {
        if (i >= data.size()) throw InvalidInput("split_holdout: index out of range");
        by_class[data.label(i) > 0 ? 1 : 0].push_back(i);
    }

    // Largest-remainder apportionment of `total` between the classes.
    std::size_t take[2];
    double remainder[2];
    std::size_t assigned = 0;
    for (int c = 0; c < 2; ++c) {
        const double quota = fraction * static_cast<double>(by_class[c].size());
        take[c] = static_cast<std::size_t>(std::floor(quota));
        remainder[c] = quota - static_cast<double>(take[c]);
        assigned += take[c];
    }
    while (assigned < total) {
        const int c = remainder[1] > remainder[0] ? 1 : 0;
        ++take[c];
        remainder[c] = -1.0;
        ++assigned;
    }

    HoldoutSplit split;
    for (int c = 0; c < 2; ++c) {
        auto& members = by_class[c];
        std::sort(members.begin(), members.end());
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(c));
        // Fisher-Yates with uniform01 keeps the shuffle identical across standard libraries.
        for (std::size_t i = members.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
            std::swap(members[i - 1], members[std::min(j, i - 1)]);
        }
        split.holdout.insert(split.holdout.end(), members.begin(), members.begin() + take[c]);
        split.train.insert(split.train.end(), members.begin() + take[c], members.end());
    }
    std::sort(split.holdout.begin(), split.holdout.end());
    std::sort(split.train.begin(), split.train.end());
    return split;
}

HoldoutSplit split_holdout(const Dataset& data, double fraction, std::uint64_t seed) {
    std::vector<Index> all(data.size());
    std::iota(all.begin(), all.end(), Index{0});
    return split_holdout(data, all, fraction, seed);
}

}  // namespace alis
