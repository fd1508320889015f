#include "cgt/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace cgt {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

double parse_double(std::string_view tok, long line, const char* what) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, std::string("non-numeric ") + what + " '" + std::string(tok) + "'");
    if (!std::isfinite(value))
        throw ParseError(line, std::string(what) + " is not finite");
    return value;
}

void parse_line(std::string_view line, long lineno, ParsedDataset& out) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);

    std::size_t pos = 0;
    const auto next_token = [&]() -> std::string_view {
        while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        const std::size_t start = pos;
        while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
        return line.substr(start, pos - start);
    };

    const std::string_view label_tok = next_token();
    if (label_tok.empty()) return; // blank or comment-only line

    const double raw_label = parse_double(label_tok, lineno, "label");
    double label;
    if (raw_label == -1.0 || raw_label == 0.0)
        label = 0.0;
    else if (raw_label == 1.0)
        label = 1.0;
    else
        throw ParseError(lineno, "label must be one of {-1, 0, +1}");

    SparseSample sample;
    sample.label = label;
    int prev_index = 0;
    for (std::string_view tok = next_token(); !tok.empty(); tok = next_token()) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos)
            throw ParseError(lineno, "missing ':' in feature token '" + std::string(tok) + "'");
        const double idx_value = parse_double(tok.substr(0, colon), lineno, "feature index");
        const int index = static_cast<int>(idx_value);
        if (idx_value != index || index < 1)
            throw ParseError(lineno, "feature index must be a positive integer");
        if (index <= prev_index)
            throw ParseError(lineno, "feature indices must be strictly increasing");
        prev_index = index;
        const double value = parse_double(tok.substr(colon + 1), lineno, "feature value");
        sample.features.emplace_back(index, value);
    }
    out.dim = std::max(out.dim, prev_index);
    out.samples.push_back(std::move(sample));
}

} // namespace

ParsedDataset parse_libsvm(std::istream& in) {
    ParsedDataset out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        parse_line(line, lineno, out);
    }
    return out;
}

ParsedDataset load_libsvm(const std::string& path, int declared_dim) {
    ParsedDataset parsed;
    if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
        gzFile gz = gzopen(path.c_str(), "rb");
        if (!gz) throw IoError("cannot open " + path);
        std::string text;
        char buf[1 << 16];
        int n;
        while ((n = gzread(gz, buf, sizeof(buf))) > 0) text.append(buf, static_cast<size_t>(n));
        const bool bad = n < 0;
        gzclose(gz);
        if (bad) throw IoError("gzip read failure on " + path);
        std::istringstream in(text);
        parsed = parse_libsvm(in);
    } else {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open " + path);
        parsed = parse_libsvm(in);
    }
    if (declared_dim > 0) {
        if (parsed.dim > declared_dim)
            throw ParseError(0, "declared dim " + std::to_string(declared_dim) +
                                    " smaller than max feature index " + std::to_string(parsed.dim));
        parsed.dim = declared_dim;
    }
    return parsed;
}

std::string serialize_libsvm(const std::vector<SparseSample>& samples) {
    std::string out;
    for (const SparseSample& s : samples) {
        out += s.label == 1.0 ? '1' : '0';
        for (const auto& [idx, val] : s.features) {
            out += ' ';
            out += std::to_string(idx);
            out += ':';
            out += fmt17(val);
        }
        out += '\n';
    }
    return out;
}

std::vector<Shard> partition(const std::vector<SparseSample>& samples, int n_agents,
                             PartitionRule rule, std::uint64_t /*seed*/, int dim) {
    if (samples.empty()) throw EmptyInput("partition: no samples");
    if (n_agents < 1) throw Error("partition: n_agents must be >= 1");
    const long n = static_cast<long>(samples.size());
    if (n_agents > n)
        throw TooManyAgents("partition: " + std::to_string(n_agents) + " agents for " +
                            std::to_string(n) + " samples");

    if (dim == 0)
        for (const SparseSample& s : samples)
            if (!s.features.empty()) dim = std::max(dim, s.features.back().first);

    std::vector<Shard> shards(n_agents);
    for (Shard& sh : shards) sh.dim = dim;

    switch (rule) {
    case PartitionRule::round_robin:
        for (long i = 0; i < n; ++i) shards[i % n_agents].samples.push_back(samples[i]);
        break;
    case PartitionRule::contiguous:
    case PartitionRule::label_skewed: {
        std::vector<long> order(n);
        for (long i = 0; i < n; ++i) order[i] = i;
        if (rule == PartitionRule::label_skewed)
            std::stable_sort(order.begin(), order.end(), [&samples](long a, long b) {
                return samples[a].label < samples[b].label;
            });
        // ceil-sized chunks, remainder in the last shard; when that would
        // leave a shard empty, fall back to the balanced split instead.
        const long chunk = (n + n_agents - 1) / n_agents;
        if (chunk * (n_agents - 1) < n) {
            for (long i = 0; i < n; ++i)
                shards[std::min<long>(i / chunk, n_agents - 1)].samples.push_back(samples[order[i]]);
        } else {
            const long base = n / n_agents, extra = n % n_agents;
            long next = 0;
            for (int a = 0; a < n_agents; ++a)
                for (long c = 0; c < base + (a < extra ? 1 : 0); ++c)
                    shards[a].samples.push_back(samples[order[next++]]);
        }
        break;
    }
    }
    return shards;
}

void scale_features_maxabs(std::vector<SparseSample>& samples, int dim) {
    std::vector<double> maxabs(static_cast<size_t>(dim) + 1, 0.0);
    for (const SparseSample& s : samples)
        for (const auto& [idx, val] : s.features) maxabs[idx] = std::max(maxabs[idx], std::abs(val));
    for (SparseSample& s : samples)
        for (auto& [idx, val] : s.features)
            if (maxabs[idx] > 0.0) val /= maxabs[idx];
}

} // namespace cgt
