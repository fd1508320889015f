#include "cgt/algo.hpp"

#include <cmath>

#include "cgt/metrics.hpp"
#include "cgt/parallel.hpp"
#include "cgt/rng.hpp"

namespace cgt {

namespace {

/// Per-agent without-replacement minibatch streams; one engine per agent so
/// draws are independent of the agent count and thread count.
class BatchSampler {
public:
    BatchSampler(const std::vector<LocalObjective>& objs, long batch_size, std::uint64_t seed) {
        const int n = static_cast<int>(objs.size());
        agents_.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            Agent& a = agents_[static_cast<size_t>(i)];
            const long total = objs[static_cast<size_t>(i)].n_samples();
            if (batch_size <= 0 || total == 0 || batch_size >= total) continue; // full batch
            a.engine = rng::make(rng::derive(seed, 0xB0'0000 + static_cast<std::uint64_t>(i)));
            a.perm.resize(static_cast<size_t>(total));
            for (long t = 0; t < total; ++t) a.perm[static_cast<size_t>(t)] = t;
            a.batch_size = batch_size;
            rng::shuffle(a.engine, a.perm);
            refill(a);
        }
    }

    /// Indices for agent i at the current step; empty means full batch.
    std::span<const long> batch(int i) const {
        const Agent& a = agents_[static_cast<size_t>(i)];
        return {a.current.data(), a.current.size()};
    }

    void advance() {
        for (Agent& a : agents_) {
            if (a.perm.empty()) continue;
            if (a.cursor >= static_cast<long>(a.perm.size())) {
                rng::shuffle(a.engine, a.perm);
                a.cursor = 0;
            }
            refill(a);
        }
    }

private:
    struct Agent {
        rng::Engine engine;
        std::vector<long> perm;
        std::vector<long> current;
        long cursor = 0;
        long batch_size = 0;
    };

    static void refill(Agent& a) {
        const long take = std::min<long>(a.batch_size, static_cast<long>(a.perm.size()) - a.cursor);
        a.current.assign(a.perm.begin() + a.cursor, a.perm.begin() + a.cursor + take);
        a.cursor += take;
    }

    std::vector<Agent> agents_;
};

Eigen::MatrixXd gradients(const Eigen::MatrixXd& x, const std::vector<LocalObjective>& objs,
                          const BatchSampler* sampler, int threads) {
    const int n = static_cast<int>(objs.size());
    Eigen::MatrixXd g(n, x.cols());
    for_each_agent(threads, n, [&](int i) {
        const std::span<const long> idx = sampler ? sampler->batch(i) : std::span<const long>{};
        g.row(i) = objs[static_cast<size_t>(i)].eval_batch(x.row(i).transpose(), idx).second;
    });
    return g;
}

void check_finite(const NetworkState& s) {
    if (!s.x.allFinite() || !s.y.allFinite())
        throw NonFiniteState(s.k, "diverged iterate or tracking variable");
}

void check_dims(const NetworkState& state, const MixingPair& mix,
                const std::vector<LocalObjective>& objs) {
    const int n = mix.n_agents;
    if (static_cast<int>(objs.size()) != n)
        throw DimensionMismatch("objective count does not match the graph");
    if (state.x.rows() != n || state.y.rows() != n || state.x.cols() != state.y.cols())
        throw DimensionMismatch("state shape does not match the graph");
    for (const LocalObjective& o : objs)
        if (o.dim() != state.x.cols()) throw DimensionMismatch("objective dimension mismatch");
}

NetworkState tracking_step(const NetworkState& state, const MixingPair& mix,
                           const std::vector<LocalObjective>& objs, const AlgoConfig& cfg,
                           const BatchSampler* sampler) {
    const int n = mix.n_agents;
    const Eigen::MatrixXd grads_old = gradients(state.x, objs, sampler, cfg.threads);

    NetworkState next;
    next.k = state.k + 1;
    next.x = mix.R * state.x;
    const double cap = cfg.alpha * cfg.c0;
    for (int i = 0; i < n; ++i) {
        const double norm = state.y.row(i).norm();
        const double step = cfg.alpha * clip_factor_norm(norm, cfg.c0);
        if (std::isfinite(cap) && step * norm > cap * (1.0 + 1e-12))
            throw Error("clipped displacement exceeded alpha*c0");
        next.x.row(i) -= step * state.y.row(i);
    }

    const Eigen::MatrixXd grads_new = gradients(next.x, objs, sampler, cfg.threads);
    // Grouped so that with N = 1 (C = [1]) the update reduces bit-exactly to
    // y^{k+1} = grad f(x^{k+1}).
    next.y = mix.C * state.y - grads_old + grads_new;
    check_finite(next);
    return next;
}

} // namespace

const char* to_string(Algorithm a) {
    switch (a) {
    case Algorithm::cgt: return "cgt";
    case Algorithm::gt: return "gt";
    case Algorithm::dgd_clip: return "dgd_clip";
    }
    return "?";
}

const char* to_string(StopReason r) {
    switch (r) {
    case StopReason::max_iters: return "max_iters";
    case StopReason::grad_tol: return "grad_tol";
    case StopReason::non_finite_state: return "non_finite_state";
    }
    return "?";
}

double clip_factor_norm(double norm, double c0) {
    if (norm <= c0 || norm == 0.0) return 1.0;
    return c0 / norm;
}

double clip_factor(const Eigen::VectorXd& y_i, double c0) {
    if (c0 <= 0.0) throw Error("clip_factor: c0 must be > 0");
    return clip_factor_norm(y_i.norm(), c0);
}

NetworkState cgt_step(const NetworkState& state, const MixingPair& mix,
                      const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    check_dims(state, mix, objs);
    return tracking_step(state, mix, objs, cfg, nullptr);
}

NetworkState gt_step(const NetworkState& state, const MixingPair& mix,
                     const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    check_dims(state, mix, objs);
    AlgoConfig unclipped = cfg;
    unclipped.c0 = std::numeric_limits<double>::infinity();
    return tracking_step(state, mix, objs, unclipped, nullptr);
}

NetworkState dgd_clip_step(const NetworkState& state, const MixingPair& mix,
                           const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    check_dims(state, mix, objs);
    const Eigen::MatrixXd grads = gradients(state.x, objs, nullptr, cfg.threads);
    NetworkState next;
    next.k = state.k + 1;
    next.x = mix.R * state.x;
    for (int i = 0; i < mix.n_agents; ++i)
        next.x.row(i) -= cfg.alpha * clip_factor_norm(grads.row(i).norm(), cfg.c0) * grads.row(i);
    next.y = state.y;
    check_finite(next);
    return next;
}

Eigen::VectorXd local_step_norms(const NetworkState& state,
                                 const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    const int n = static_cast<int>(state.x.rows());
    Eigen::VectorXd norms(n);
    if (cfg.algorithm == Algorithm::dgd_clip) {
        for_each_agent(cfg.threads, n, [&](int i) {
            const double gn =
                objs[static_cast<size_t>(i)].gradient(state.x.row(i).transpose()).norm();
            norms(i) = cfg.alpha * clip_factor_norm(gn, cfg.c0) * gn;
        });
    } else {
        const double c0 = cfg.algorithm == Algorithm::gt
                              ? std::numeric_limits<double>::infinity()
                              : cfg.c0;
        for (int i = 0; i < n; ++i) {
            const double yn = state.y.row(i).norm();
            norms(i) = cfg.alpha * clip_factor_norm(yn, c0) * yn;
        }
    }
    return norms;
}

NetworkState make_initial_state(const Eigen::MatrixXd& initial_x, const MixingPair& mix,
                                const std::vector<LocalObjective>& objs, const AlgoConfig& cfg) {
    NetworkState state;
    state.k = 0;
    state.x = initial_x;
    if (cfg.algorithm == Algorithm::dgd_clip) {
        state.y = Eigen::MatrixXd::Zero(initial_x.rows(), initial_x.cols());
    } else {
        const BatchSampler sampler(objs, cfg.batch_size, cfg.batch_seed);
        state.y = gradients(state.x, objs, &sampler, cfg.threads);
    }
    check_dims(state, mix, objs);
    check_finite(state);
    return state;
}

RunResult run(const Eigen::MatrixXd& initial_x, const MixingPair& mix,
              const std::vector<LocalObjective>& objs, const AlgoConfig& cfg,
              const Recorder& recorder) {
    if (cfg.alpha <= 0.0) throw Error("run: alpha must be > 0");
    if (cfg.c0 <= 0.0) throw Error("run: c0 must be > 0");
    if (cfg.max_iters < 0) throw Error("run: max_iters must be >= 0");

    AlgoConfig effective = cfg;
    if (cfg.algorithm == Algorithm::gt) effective.c0 = std::numeric_limits<double>::infinity();

    BatchSampler sampler(objs, effective.batch_size, effective.batch_seed);
    const bool tracking = effective.algorithm != Algorithm::dgd_clip;

    NetworkState state;
    state.k = 0;
    state.x = initial_x;
    state.y = tracking ? gradients(state.x, objs, &sampler, effective.threads)
                       : Eigen::MatrixXd::Zero(initial_x.rows(), initial_x.cols());
    check_dims(state, mix, objs);
    check_finite(state);

    RunResult result;
    double min_grad = std::numeric_limits<double>::infinity();
    while (true) {
        TrajectoryRecord rec = record_step(state, mix, objs, effective);
        min_grad = std::min(min_grad, rec.grad_norm_avg);
        rec.min_grad_so_far = min_grad;
        if (recorder) recorder(rec);

        if (effective.grad_tol && rec.grad_norm_avg <= *effective.grad_tol) {
            result.reason = StopReason::grad_tol;
            break;
        }
        if (state.k >= effective.max_iters) {
            result.reason = StopReason::max_iters;
            break;
        }
        try {
            state = tracking ? tracking_step(state, mix, objs, effective, &sampler)
                             : dgd_clip_step(state, mix, objs, effective);
        } catch (const NonFiniteState& e) {
            result.reason = StopReason::non_finite_state;
            result.divergence_iter = e.iteration;
            break;
        }
        sampler.advance();
    }
    result.iterations = state.k;
    result.state = std::move(state);
    return result;
}

Lemma6Report lemma6_check(const Eigen::VectorXd& y_i, double v_i, double v_norm,
                          const Eigen::VectorXd& gradF, double alpha, double c0) {
    if (v_i <= 0.0) throw Error("lemma6_check: v_i must be > 0");
    Lemma6Report rep;
    const double yn = y_i.norm();
    const double gn = gradF.norm();
    rep.alpha_i = alpha * clip_factor_norm(yn, c0);
    rep.alpha_bar_i = alpha * clip_factor_norm(v_i * gn, c0);
    rep.alpha_bar = alpha * clip_factor_norm(v_norm * gn, c0);
    const double lhs = std::abs(rep.alpha_i - rep.alpha_bar_i) * yn;
    const double rhs = rep.alpha_bar_i * (y_i - v_i * gradF).norm();
    rep.slack_couple = rhs - lhs;
    rep.slack_order = rep.alpha_bar_i - rep.alpha_bar;
    return rep;
}

std::vector<Lemma6Report> lemma6_check(const NetworkState& state, const MixingPair& mix,
                                       const Eigen::VectorXd& gradF_at_xbar, double alpha,
                                       double c0) {
    std::vector<Lemma6Report> reports;
    const double v_norm = mix.v.norm();
    reports.reserve(static_cast<size_t>(mix.n_agents));
    for (int i = 0; i < mix.n_agents; ++i)
        reports.push_back(lemma6_check(state.y.row(i).transpose(), mix.v(i), v_norm,
                                       gradF_at_xbar, alpha, c0));
    return reports;
}

} // namespace cgt
