#include "cgt/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cgt {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '[' || ch == '(') ++depth;
        if (ch == ']' || ch == ')') --depth;
        if (ch == sep && depth == 0) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

// Raw sectioned key-value view of the file.
struct RawConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::map<std::string, std::vector<std::string>> consumed;

    const std::string* find(const std::string& section, const std::string& key) {
        auto sit = sections.find(section);
        if (sit == sections.end()) return nullptr;
        auto kit = sit->second.find(key);
        if (kit == sit->second.end()) return nullptr;
        consumed[section].push_back(key);
        return &kit->second;
    }
};

RawConfig read_raw(std::istream& in, const std::string& origin) {
    RawConfig raw;
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno), "malformed section header");
            section = trim(text.substr(1, text.size() - 2));
            raw.sections[section]; // register even if empty
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno), "expected 'key = value'");
        if (section.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno), "key outside any [section]");
        const std::string key = trim(text.substr(0, eq));
        raw.sections[section][key] = trim(text.substr(eq + 1));
    }
    return raw;
}

double to_double(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number, got '" + v + "'");
    }
}

long to_long(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an integer, got '" + v + "'");
    }
}

std::uint64_t to_u64(const std::string& v, const std::string& field) {
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected an unsigned integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& field) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(field, "expected true/false, got '" + v + "'");
}

std::vector<double> to_double_list(const std::string& v, const std::string& field) {
    std::vector<double> out;
    for (const std::string& tok : split(v, ','))
        out.push_back(to_double(tok, field));
    if (out.empty()) throw ConfigError(field, "expected at least one number");
    return out;
}

Eigen::VectorXd to_vector(const std::string& v, const std::string& field) {
    std::string body = trim(v);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']')
        throw ConfigError(field, "expected a vector literal [a, b, ...]");
    const std::vector<double> xs = to_double_list(body.substr(1, body.size() - 2), field);
    Eigen::VectorXd out(static_cast<long>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) out(static_cast<long>(i)) = xs[i];
    return out;
}

Eigen::MatrixXd to_matrix(const std::string& v, const std::string& field) {
    std::string body = trim(v);
    if (body.rfind("diag(", 0) == 0 && body.back() == ')') {
        const std::vector<double> d = to_double_list(body.substr(5, body.size() - 6), field);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<long>(d.size()),
                                                  static_cast<long>(d.size()));
        for (std::size_t i = 0; i < d.size(); ++i) M(static_cast<long>(i), static_cast<long>(i)) = d[i];
        return M;
    }
    if (body.size() < 4 || body.front() != '[' || body.back() != ']')
        throw ConfigError(field, "expected [[...],[...]] or diag(...)");
    const std::vector<std::string> rows = split(body.substr(1, body.size() - 2), ',');
    std::vector<Eigen::VectorXd> parsed;
    for (const std::string& r : rows) parsed.push_back(to_vector(r, field));
    const long n = static_cast<long>(parsed.size());
    Eigen::MatrixXd M(n, parsed.front().size());
    for (long i = 0; i < n; ++i) {
        if (parsed[static_cast<size_t>(i)].size() != M.cols())
            throw ConfigError(field, "ragged matrix literal");
        M.row(i) = parsed[static_cast<size_t>(i)];
    }
    return M;
}

std::vector<Edge> to_edges(const std::string& v, const std::string& field) {
    std::vector<Edge> edges;
    for (const std::string& tok : split(v, ';')) {
        std::istringstream es(tok);
        Edge e;
        if (!(es >> e.from >> e.to)) throw ConfigError(field, "edge must be 'from to [weight]'");
        if (!(es >> e.weight)) e.weight = 1.0;
        edges.push_back(e);
    }
    if (edges.empty()) throw ConfigError(field, "expected at least one edge");
    return edges;
}

void check_unknown(const RawConfig& raw) {
    for (const auto& [section, keys] : raw.sections) {
        const auto cit = raw.consumed.find(section);
        if (cit == raw.consumed.end()) {
            if (!keys.empty()) throw ConfigError(section, "unknown section");
            throw ConfigError(section, "unknown empty section");
        }
        for (const auto& [key, value] : keys)
            if (std::find(cit->second.begin(), cit->second.end(), key) == cit->second.end())
                throw ConfigError(section + "." + key, "unknown key");
    }
}

} // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    RawConfig raw = read_raw(in, origin);
    ExperimentConfig cfg;

    // [graph]
    if (const std::string* v = raw.find("graph", "kind")) {
        if (*v == "directed_ring") cfg.graph.kind = GraphKind::directed_ring;
        else if (*v == "random_strongly_connected") cfg.graph.kind = GraphKind::random_strongly_connected;
        else if (*v == "explicit") cfg.graph.kind = GraphKind::explicit_edges;
        else throw ConfigError("graph.kind", "unknown kind '" + *v + "'");
    }
    if (const std::string* v = raw.find("graph", "n_agents"))
        cfg.graph.n_agents = static_cast<int>(to_long(*v, "graph.n_agents"));
    if (const std::string* v = raw.find("graph", "density"))
        cfg.graph.density = to_double(*v, "graph.density");
    if (const std::string* v = raw.find("graph", "seed"))
        cfg.graph.seed = to_u64(*v, "graph.seed");
    if (const std::string* v = raw.find("graph", "edges"))
        cfg.graph.edges = to_edges(*v, "graph.edges");

    // [objective]
    if (const std::string* v = raw.find("objective", "kind")) {
        if (*v == "logistic_lq") cfg.objective.kind = ObjectiveKind::logistic_lq;
        else if (*v == "quadratic") cfg.objective.kind = ObjectiveKind::quadratic;
        else if (*v == "power_norm") cfg.objective.kind = ObjectiveKind::power_norm;
        else if (*v == "custom_composite") cfg.objective.kind = ObjectiveKind::custom_composite;
        else throw ConfigError("objective.kind", "unknown kind '" + *v + "'");
    }
    if (const std::string* v = raw.find("objective", "data")) cfg.objective.data_path = *v;
    if (const std::string* v = raw.find("objective", "dim"))
        cfg.objective.dim = static_cast<int>(to_long(*v, "objective.dim"));
    if (const std::string* v = raw.find("objective", "partition")) {
        if (*v == "contiguous") cfg.objective.partition = PartitionRule::contiguous;
        else if (*v == "round_robin") cfg.objective.partition = PartitionRule::round_robin;
        else if (*v == "label_skewed") cfg.objective.partition = PartitionRule::label_skewed;
        else throw ConfigError("objective.partition", "unknown rule '" + *v + "'");
    }
    if (const std::string* v = raw.find("objective", "lambda"))
        cfg.objective.lambda = to_double_list(*v, "objective.lambda");
    if (const std::string* v = raw.find("objective", "p"))
        cfg.objective.p = to_double_list(*v, "objective.p");
    if (const std::string* v = raw.find("objective", "scale_features"))
        cfg.objective.scale_features = to_bool(*v, "objective.scale_features");
    if (const std::string* v = raw.find("objective", "loss_variant")) {
        if (*v == "standard") cfg.objective.loss_variant = LossVariant::standard;
        else if (*v == "label0_flipped") cfg.objective.loss_variant = LossVariant::label0_flipped;
        else throw ConfigError("objective.loss_variant", "unknown variant '" + *v + "'");
    }

    // [objective.agent<i>]
    for (const auto& [section, keys] : raw.sections) {
        if (section.rfind("objective.agent", 0) != 0) continue;
        const std::string tail = section.substr(std::string("objective.agent").size());
        int agent = 0;
        try {
            agent = std::stoi(tail);
        } catch (const std::exception&) {
            throw ConfigError(section, "agent sections are [objective.agent<i>] with i >= 1");
        }
        if (agent < 1) throw ConfigError(section, "agent index must be >= 1");
        AgentBlock block;
        if (const std::string* v = raw.find(section, "Q")) block.Q = to_matrix(*v, section + ".Q");
        if (const std::string* v = raw.find(section, "b")) block.b = to_vector(*v, section + ".b");
        if (const std::string* v = raw.find(section, "c")) block.c = to_double(*v, section + ".c");
        if (const std::string* v = raw.find(section, "lambda"))
            block.lambda = to_double(*v, section + ".lambda");
        if (const std::string* v = raw.find(section, "p")) block.p = to_double(*v, section + ".p");
        (void)keys;
        cfg.objective.agent_blocks[agent] = std::move(block);
    }

    // [algorithm]
    if (const std::string* v = raw.find("algorithm", "algorithm")) {
        if (*v == "cgt") cfg.algorithm.algorithm = Algorithm::cgt;
        else if (*v == "gt") cfg.algorithm.algorithm = Algorithm::gt;
        else if (*v == "dgd_clip") cfg.algorithm.algorithm = Algorithm::dgd_clip;
        else throw ConfigError("algorithm.algorithm", "unknown algorithm '" + *v + "'");
    }
    if (const std::string* v = raw.find("algorithm", "alpha"))
        cfg.algorithm.alpha = to_double(*v, "algorithm.alpha");
    if (const std::string* v = raw.find("algorithm", "c0")) {
        if (*v == "inf" || *v == "infinity")
            cfg.algorithm.c0 = std::numeric_limits<double>::infinity();
        else if (*v == "auto")
            cfg.c0_auto = true;
        else
            cfg.algorithm.c0 = to_double(*v, "algorithm.c0");
    }
    if (const std::string* v = raw.find("algorithm", "max_iters"))
        cfg.algorithm.max_iters = to_long(*v, "algorithm.max_iters");
    if (const std::string* v = raw.find("algorithm", "grad_tol"))
        cfg.algorithm.grad_tol = to_double(*v, "algorithm.grad_tol");
    if (const std::string* v = raw.find("algorithm", "batch")) {
        if (*v == "full") cfg.algorithm.batch_size = 0;
        else cfg.algorithm.batch_size = to_long(*v, "algorithm.batch");
    }

    // [probe]
    if (const std::string* v = raw.find("probe", "radius"))
        cfg.probe.radius = to_double(*v, "probe.radius");
    if (const std::string* v = raw.find("probe", "n_samples"))
        cfg.probe.n_samples = static_cast<int>(to_long(*v, "probe.n_samples"));
    if (const std::string* v = raw.find("probe", "n_points"))
        cfg.probe.n_points = static_cast<int>(to_long(*v, "probe.n_points"));

    // [run]
    if (const std::string* v = raw.find("run", "seed")) cfg.run.seed = to_u64(*v, "run.seed");
    if (const std::string* v = raw.find("run", "output")) cfg.run.output = *v;
    if (const std::string* v = raw.find("run", "repeat"))
        cfg.run.repeat = static_cast<int>(to_long(*v, "run.repeat"));
    if (const std::string* v = raw.find("run", "init_scale"))
        cfg.run.init_scale = to_double(*v, "run.init_scale");
    if (const std::string* v = raw.find("run", "record_local_loss"))
        cfg.run.record_local_loss = to_bool(*v, "run.record_local_loss");
    if (const std::string* v = raw.find("run", "threads"))
        cfg.run.threads = static_cast<int>(to_long(*v, "run.threads"));

    check_unknown(raw);
    cfg.algorithm.threads = cfg.run.threads;
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    ExperimentConfig cfg = parse_config(in, path);
    validate_config(cfg);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    const int n = cfg.graph.n_agents;
    if (n < 1) throw ConfigError("graph.n_agents", "must be >= 1");
    if (cfg.graph.kind == GraphKind::random_strongly_connected &&
        !(cfg.graph.density > 0.0 && cfg.graph.density <= 1.0))
        throw ConfigError("graph.density", "must lie in (0, 1]");
    if (cfg.graph.kind == GraphKind::explicit_edges && cfg.graph.edges.empty())
        throw ConfigError("graph.edges", "explicit graphs need an edge list");

    const auto check_list = [n](const std::vector<double>& xs, const std::string& field) {
        if (!xs.empty() && xs.size() != 1 && static_cast<int>(xs.size()) != n)
            throw ConfigError(field, "need 1 or n_agents=" + std::to_string(n) + " values, got " +
                                         std::to_string(xs.size()));
    };
    check_list(cfg.objective.lambda, "objective.lambda");
    check_list(cfg.objective.p, "objective.p");

    switch (cfg.objective.kind) {
    case ObjectiveKind::logistic_lq:
        if (cfg.objective.data_path.empty())
            throw ConfigError("objective.data", "logistic_lq needs a data file");
        if (!std::filesystem::exists(cfg.objective.data_path))
            throw ConfigError("objective.data",
                              "file does not exist: " + cfg.objective.data_path);
        break;
    case ObjectiveKind::power_norm:
        if (cfg.objective.dim < 1)
            throw ConfigError("objective.dim", "power_norm needs an explicit dimension");
        if (cfg.objective.lambda.empty() || cfg.objective.p.empty())
            throw ConfigError("objective.lambda", "power_norm needs lambda and p");
        break;
    case ObjectiveKind::quadratic:
    case ObjectiveKind::custom_composite:
        if (cfg.objective.dim < 1)
            throw ConfigError("objective.dim", "synthetic kinds need an explicit dimension");
        for (const auto& [agent, block] : cfg.objective.agent_blocks) {
            if (agent > n)
                throw ConfigError("objective.agent" + std::to_string(agent),
                                  "agent index exceeds graph.n_agents=" + std::to_string(n));
            if (block.Q && (block.Q->rows() != cfg.objective.dim || block.Q->cols() != cfg.objective.dim))
                throw ConfigError("objective.agent" + std::to_string(agent) + ".Q",
                                  "matrix does not match objective.dim");
            if (block.b && block.b->size() != cfg.objective.dim)
                throw ConfigError("objective.agent" + std::to_string(agent) + ".b",
                                  "vector does not match objective.dim");
        }
        break;
    }

    if (cfg.algorithm.alpha <= 0.0) throw ConfigError("algorithm.alpha", "must be > 0");
    if (!cfg.c0_auto && cfg.algorithm.c0 <= 0.0) throw ConfigError("algorithm.c0", "must be > 0");
    if (cfg.c0_auto && cfg.algorithm.max_iters < 1)
        throw ConfigError("algorithm.c0", "c0 = auto needs max_iters >= 1");
    if (cfg.algorithm.max_iters < 0) throw ConfigError("algorithm.max_iters", "must be >= 0");
    if (cfg.algorithm.batch_size < 0) throw ConfigError("algorithm.batch", "must be 'full' or > 0");
    if (cfg.algorithm.algorithm == Algorithm::gt && !cfg.c0_auto &&
        std::isfinite(cfg.algorithm.c0))
        throw ConfigError("algorithm.c0", "gt requires c0 = inf");
    if (cfg.run.repeat < 1) throw ConfigError("run.repeat", "must be >= 1");
    if (cfg.run.threads < 1) throw ConfigError("run.threads", "must be >= 1");
    if (cfg.run.output.empty()) throw ConfigError("run.output", "must not be empty");
}

std::vector<LocalObjective> build_objectives(const ObjectiveSpec& spec, int n_agents) {
    const auto pick = [n_agents](const std::vector<double>& xs, double fallback, int agent) {
        if (xs.empty()) return fallback;
        return xs.size() == 1 ? xs[0] : xs[static_cast<size_t>(agent)];
    };

    std::vector<LocalObjective> objs;
    objs.reserve(static_cast<size_t>(n_agents));

    switch (spec.kind) {
    case ObjectiveKind::logistic_lq: {
        ParsedDataset data = load_libsvm(spec.data_path, spec.dim);
        if (spec.scale_features) scale_features_maxabs(data.samples, data.dim);
        std::vector<Shard> shards = partition(data.samples, n_agents, spec.partition, 0, data.dim);
        for (int i = 0; i < n_agents; ++i) {
            auto shard = std::make_shared<Shard>(std::move(shards[static_cast<size_t>(i)]));
            objs.push_back(LocalObjective::logistic_lq(std::move(shard), pick(spec.lambda, 0.0, i),
                                                       pick(spec.p, 2.0, i), spec.loss_variant));
        }
        break;
    }
    case ObjectiveKind::power_norm:
        for (int i = 0; i < n_agents; ++i)
            objs.push_back(LocalObjective::power_norm(spec.dim, pick(spec.lambda, 0.0, i),
                                                      pick(spec.p, 2.0, i)));
        break;
    case ObjectiveKind::quadratic:
        for (int i = 0; i < n_agents; ++i) {
            const auto it = spec.agent_blocks.find(i + 1);
            if (it == spec.agent_blocks.end())
                throw ConfigError("objective.agent" + std::to_string(i + 1),
                                  "quadratic objectives need one section per agent");
            const AgentBlock& blk = it->second;
            Eigen::MatrixXd Q = blk.Q ? *blk.Q : Eigen::MatrixXd::Zero(spec.dim, spec.dim);
            Eigen::VectorXd b = blk.b ? *blk.b : Eigen::VectorXd::Zero(spec.dim);
            objs.push_back(LocalObjective::quadratic(std::move(Q), std::move(b), blk.c.value_or(0.0)));
        }
        break;
    case ObjectiveKind::custom_composite:
        for (int i = 0; i < n_agents; ++i) {
            const auto it = spec.agent_blocks.find(i + 1);
            if (it == spec.agent_blocks.end())
                throw ConfigError("objective.agent" + std::to_string(i + 1),
                                  "custom_composite needs one section per agent");
            const AgentBlock& blk = it->second;
            std::vector<LocalObjective> parts;
            if (blk.Q || blk.b || blk.c) {
                Eigen::MatrixXd Q = blk.Q ? *blk.Q : Eigen::MatrixXd::Zero(spec.dim, spec.dim);
                Eigen::VectorXd b = blk.b ? *blk.b : Eigen::VectorXd::Zero(spec.dim);
                parts.push_back(LocalObjective::quadratic(std::move(Q), std::move(b), blk.c.value_or(0.0)));
            }
            const double lam = blk.lambda ? *blk.lambda : pick(spec.lambda, 0.0, i);
            if (lam > 0.0)
                parts.push_back(LocalObjective::power_norm(
                    spec.dim, lam, blk.p ? *blk.p : pick(spec.p, 2.0, i)));
            if (parts.empty())
                throw ConfigError("objective.agent" + std::to_string(i + 1),
                                  "custom_composite agent has no components");
            objs.push_back(LocalObjective::composite(std::move(parts)));
        }
        break;
    }
    return objs;
}

std::string dump_config(const ExperimentConfig& cfg) {
    std::string out;
    const auto kv = [&out](const std::string& k, const std::string& v) {
        out += k + " = " + v + "\n";
    };

    out += "[graph]\n";
    switch (cfg.graph.kind) {
    case GraphKind::directed_ring: kv("kind", "directed_ring"); break;
    case GraphKind::random_strongly_connected: kv("kind", "random_strongly_connected"); break;
    case GraphKind::explicit_edges: kv("kind", "explicit"); break;
    }
    kv("n_agents", std::to_string(cfg.graph.n_agents));
    if (cfg.graph.kind == GraphKind::random_strongly_connected)
        kv("density", fmt17(cfg.graph.density));
    kv("seed", std::to_string(cfg.graph.seed));
    if (!cfg.graph.edges.empty()) {
        std::string edges;
        for (const Edge& e : cfg.graph.edges) {
            if (!edges.empty()) edges += "; ";
            edges += std::to_string(e.from) + " " + std::to_string(e.to) + " " + fmt17(e.weight);
        }
        kv("edges", edges);
    }

    out += "\n[objective]\n";
    switch (cfg.objective.kind) {
    case ObjectiveKind::logistic_lq: kv("kind", "logistic_lq"); break;
    case ObjectiveKind::quadratic: kv("kind", "quadratic"); break;
    case ObjectiveKind::power_norm: kv("kind", "power_norm"); break;
    case ObjectiveKind::custom_composite: kv("kind", "custom_composite"); break;
    }
    if (!cfg.objective.data_path.empty()) kv("data", cfg.objective.data_path);
    if (cfg.objective.dim > 0) kv("dim", std::to_string(cfg.objective.dim));
    switch (cfg.objective.partition) {
    case PartitionRule::contiguous: kv("partition", "contiguous"); break;
    case PartitionRule::round_robin: kv("partition", "round_robin"); break;
    case PartitionRule::label_skewed: kv("partition", "label_skewed"); break;
    }
    const auto list_out = [&kv](const std::string& key, const std::vector<double>& xs) {
        if (xs.empty()) return;
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ", ";
            s += fmt17(xs[i]);
        }
        kv(key, s);
    };
    list_out("lambda", cfg.objective.lambda);
    list_out("p", cfg.objective.p);
    kv("scale_features", cfg.objective.scale_features ? "true" : "false");
    kv("loss_variant",
       cfg.objective.loss_variant == LossVariant::standard ? "standard" : "label0_flipped");

    for (const auto& [agent, blk] : cfg.objective.agent_blocks) {
        out += "\n[objective.agent" + std::to_string(agent) + "]\n";
        if (blk.Q) {
            std::string m = "[";
            for (long i = 0; i < blk.Q->rows(); ++i) {
                if (i) m += ", ";
                m += "[";
                for (long j = 0; j < blk.Q->cols(); ++j) {
                    if (j) m += ", ";
                    m += fmt17((*blk.Q)(i, j));
                }
                m += "]";
            }
            kv("Q", m + "]");
        }
        if (blk.b) {
            std::string vec = "[";
            for (long i = 0; i < blk.b->size(); ++i) {
                if (i) vec += ", ";
                vec += fmt17((*blk.b)(i));
            }
            kv("b", vec + "]");
        }
        if (blk.c) kv("c", fmt17(*blk.c));
        if (blk.lambda) kv("lambda", fmt17(*blk.lambda));
        if (blk.p) kv("p", fmt17(*blk.p));
    }

    out += "\n[algorithm]\n";
    kv("algorithm", to_string(cfg.algorithm.algorithm));
    kv("alpha", fmt17(cfg.algorithm.alpha));
    if (cfg.c0_auto)
        kv("c0", "auto");
    else if (std::isinf(cfg.algorithm.c0))
        kv("c0", "inf");
    else
        kv("c0", fmt17(cfg.algorithm.c0));
    kv("max_iters", std::to_string(cfg.algorithm.max_iters));
    if (cfg.algorithm.grad_tol) kv("grad_tol", fmt17(*cfg.algorithm.grad_tol));
    kv("batch", cfg.algorithm.batch_size > 0 ? std::to_string(cfg.algorithm.batch_size) : "full");

    out += "\n[probe]\n";
    kv("radius", fmt17(cfg.probe.radius));
    kv("n_samples", std::to_string(cfg.probe.n_samples));
    kv("n_points", std::to_string(cfg.probe.n_points));

    out += "\n[run]\n";
    kv("seed", std::to_string(cfg.run.seed));
    kv("output", cfg.run.output);
    kv("repeat", std::to_string(cfg.run.repeat));
    kv("init_scale", fmt17(cfg.run.init_scale));
    kv("record_local_loss", cfg.run.record_local_loss ? "true" : "false");
    kv("threads", std::to_string(cfg.run.threads));
    return out;
}

} // namespace cgt
