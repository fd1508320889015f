#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cgt/config.hpp"
#include "cgt/metrics.hpp"

namespace cgt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;

/// Environment variable that redirects relative output prefixes.
inline constexpr const char* kOutputDirEnv = "CGT_OUTPUT_DIR";

struct CliOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    bool quiet = false;
};

struct SingleRun {
    RunResult result;
    std::vector<TrajectoryRecord> records;
    std::string csv_path;
    std::string meta_path;
    std::uint64_t seed_used = 0;
};

/// x^0 with rows drawn elementwise from a seeded standard normal times
/// `scale` (exact zeros when scale == 0).
Eigen::MatrixXd initial_iterates(int n_agents, int dim, double scale, std::uint64_t seed);

/// Applies CGT_OUTPUT_DIR to relative prefixes and creates parent
/// directories.
std::string resolve_output_prefix(const std::string& prefix);

/// One seeded run: writes <prefix>.csv and <prefix>.meta (suffix _r<i> when
/// the config repeats) and returns the trajectory.
SingleRun execute_run(const ExperimentConfig& cfg, const MixingPair& mix,
                      const std::vector<LocalObjective>& objs, int repeat_index,
                      const std::string& output_prefix);

/// All repeats of a config (seeds base, base+1, ...).
std::vector<SingleRun> run_config(const ExperimentConfig& cfg);

struct RatePoint {
    long K = 0;
    double c0 = 0.0;
    double min_grad = 0.0;
    std::string csv_path;
};
struct RateResult {
    std::vector<RatePoint> points;
    double slope = 0.0; ///< fitted log-log slope of min_grad vs K
};

/// Theorem-style budget sweep: for each K runs the base config with
/// max_iters = K and c0 = 1/sqrt(K). Needs >= 3 increasing budgets.
RateResult run_rate(const ExperimentConfig& base, const std::vector<long>& Ks);

struct AlphaBoundDiagnostic {
    double bound = 0.0; ///< u^T v / (9 L_hat N ||v||^2)
    double L_hat = 0.0;
    double G_hat = 0.0;
    double L0_global = 0.0;
    double L1_global = 0.0;
    double ell_hat = 1.0;
    double b_hat = 0.0;
};

/// Probe-based stepsize hint printed after runs (not part of the metadata).
AlphaBoundDiagnostic alpha_bound_diagnostic(const MixingPair& mix,
                                            const std::vector<LocalObjective>& objs,
                                            const std::vector<TrajectoryRecord>& records,
                                            const ProbeSpec& probe, std::uint64_t seed);

int cmd_run(const std::string& config_path, const CliOptions& opts, std::ostream& out,
            std::ostream& err);
int cmd_graph(const GraphSpec& spec, const CliOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_probe(const std::string& config_path, const CliOptions& opts, std::ostream& out,
              std::ostream& err);
int cmd_rate(const std::string& config_path, const std::vector<long>& Ks, const CliOptions& opts,
             std::ostream& out, std::ostream& err);
int cmd_compare(const std::vector<std::string>& config_paths, const CliOptions& opts,
                std::ostream& out, std::ostream& err);

} // namespace cgt
