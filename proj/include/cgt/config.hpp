#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cgt/algo.hpp"
#include "cgt/graph.hpp"
#include "cgt/objective.hpp"

namespace cgt {

/// Per-agent overrides for quadratic / custom_composite objectives.
struct AgentBlock {
    std::optional<Eigen::MatrixXd> Q;
    std::optional<Eigen::VectorXd> b;
    std::optional<double> c;
    std::optional<double> lambda;
    std::optional<double> p;
};

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::logistic_lq;
    std::string data_path;
    int dim = 0; ///< declared dimension (required for synthetic kinds)
    PartitionRule partition = PartitionRule::contiguous;
    std::vector<double> lambda; ///< length 1 (broadcast) or n_agents
    std::vector<double> p;
    bool scale_features = false;
    LossVariant loss_variant = LossVariant::standard;
    std::map<int, AgentBlock> agent_blocks; ///< 1-based agent index
};

struct ProbeSpec {
    double radius = 1.0;
    int n_samples = 128;
    int n_points = 16; ///< dissimilarity sample points
};

struct RunSpec {
    std::uint64_t seed = 0;
    std::string output = "out/run";
    int repeat = 1;
    double init_scale = 0.0;
    bool record_local_loss = false;
    int threads = 1;
};

struct ExperimentConfig {
    GraphSpec graph;
    ObjectiveSpec objective;
    AlgoConfig algorithm;
    bool c0_auto = false; ///< c0 = 1/sqrt(max_iters)
    ProbeSpec probe;
    RunSpec run;
};

/// Parses the sectioned key-value config format; unknown sections or keys are
/// ConfigErrors with the offending field path.
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
ExperimentConfig load_config(const std::string& path);

/// Emits the fully resolved config (every default filled in) in the same
/// format; deterministic field order.
std::string dump_config(const ExperimentConfig& cfg);

/// Cross-section validation: agent counts, file existence, list lengths.
void validate_config(const ExperimentConfig& cfg);

/// Instantiates the per-agent objectives (loads and partitions data for
/// logistic kinds).
std::vector<LocalObjective> build_objectives(const ObjectiveSpec& spec, int n_agents);

} // namespace cgt
