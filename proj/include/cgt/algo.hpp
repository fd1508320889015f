#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "cgt/graph.hpp"
#include "cgt/objective.hpp"

namespace cgt {

enum class Algorithm { cgt, gt, dgd_clip };

const char* to_string(Algorithm a);

struct AlgoConfig {
    Algorithm algorithm = Algorithm::cgt;
    double alpha = 0.0;
    double c0 = std::numeric_limits<double>::infinity(); ///< gt keeps infinity
    long max_iters = 0;
    std::optional<double> grad_tol; ///< on ||grad F(xbar)||
    long batch_size = 0;            ///< 0 = full batch
    std::uint64_t batch_seed = 0;
    int threads = 1;
};

/// Stacked iterates (row i = agent i) and tracking variables.
struct NetworkState {
    Eigen::MatrixXd x;
    Eigen::MatrixXd y;
    long k = 0;
};

enum class StopReason { max_iters, grad_tol, non_finite_state };

const char* to_string(StopReason r);

struct RunResult {
    NetworkState state; ///< last finite state
    StopReason reason = StopReason::max_iters;
    long iterations = 0;
    std::optional<long> divergence_iter;
};

/// min{1, c0/||y_i||}; 1 on the zero vector.
double clip_factor(const Eigen::VectorXd& y_i, double c0);
double clip_factor_norm(double norm, double c0);

/// One full-batch step of each engine. cgt/gt advance both x and y; dgd_clip
/// advances x from clipped local gradients and leaves y untouched. Throws
/// NonFiniteState when an entry diverges.
NetworkState cgt_step(const NetworkState& state, const MixingPair& mix,
                      const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);
NetworkState gt_step(const NetworkState& state, const MixingPair& mix,
                     const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);
NetworkState dgd_clip_step(const NetworkState& state, const MixingPair& mix,
                           const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);

/// Norm of each agent's upcoming descent displacement from this state
/// (alpha_i^k ||y_i^k|| for tracking engines, clipped local gradient for
/// dgd_clip).
Eigen::VectorXd local_step_norms(const NetworkState& state,
                                 const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);

/// Tracking initialization y^0 = grad f(x^0) (on the first minibatch when
/// batching); dgd_clip gets zeros.
NetworkState make_initial_state(const Eigen::MatrixXd& initial_x, const MixingPair& mix,
                                const std::vector<LocalObjective>& objs, const AlgoConfig& cfg);

struct TrajectoryRecord;
using Recorder = std::function<void(const TrajectoryRecord&)>;

/// Full optimization loop: records the state at k = 0..K (inclusive), stops
/// on max_iters, on grad_tol at the u-weighted average iterate, or on a
/// non-finite state (recorded, not rethrown). Bit-reproducible for a fixed
/// config regardless of cfg.threads.
RunResult run(const Eigen::MatrixXd& initial_x, const MixingPair& mix,
              const std::vector<LocalObjective>& objs, const AlgoConfig& cfg,
              const Recorder& recorder);

struct Lemma6Report {
    double alpha_i = 0.0;     ///< clipped stepsize from y_i
    double alpha_bar_i = 0.0; ///< stepsize from v_i ||grad F||
    double alpha_bar = 0.0;   ///< stepsize from ||v|| ||grad F||
    double slack_couple = 0.0; ///< abar_i ||y_i - v_i gradF|| - |a_i - abar_i| ||y_i||
    double slack_order = 0.0;  ///< abar_i - abar
};

/// Clipped-stepsize comparison for one agent; both slacks are nonnegative in
/// exact arithmetic.
Lemma6Report lemma6_check(const Eigen::VectorXd& y_i, double v_i, double v_norm,
                          const Eigen::VectorXd& gradF, double alpha, double c0);

/// Network variant: one report per agent, ||v|| taken from mix.v.
std::vector<Lemma6Report> lemma6_check(const NetworkState& state, const MixingPair& mix,
                                       const Eigen::VectorXd& gradF_at_xbar, double alpha,
                                       double c0);

} // namespace cgt
