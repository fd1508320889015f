#include "cgt/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cgt/rng.hpp"
#include "cgt/synth.hpp"

namespace cgt {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

AlgoConfig resolve_algorithm(const ExperimentConfig& cfg, std::uint64_t seed) {
    AlgoConfig a = cfg.algorithm;
    if (cfg.c0_auto) a.c0 = 1.0 / std::sqrt(static_cast<double>(std::max<long>(1, a.max_iters)));
    a.batch_seed = rng::derive(seed, 0x6261746368ULL); // "batch"
    a.threads = cfg.run.threads;
    return a;
}

ExperimentConfig resolved_for_meta(const ExperimentConfig& cfg, std::uint64_t seed,
                                   const std::string& prefix, const AlgoConfig& acfg) {
    ExperimentConfig copy = cfg;
    copy.run.seed = seed;
    copy.run.repeat = 1;
    copy.run.output = prefix;
    copy.c0_auto = false;
    copy.algorithm.c0 = acfg.c0;
    return copy;
}

void write_meta(const std::string& path, const ExperimentConfig& resolved, const MixingPair& mix,
                const SingleRun& run) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << "# run result\n";
    out << "algorithm = " << to_string(resolved.algorithm.algorithm) << '\n';
    out << "stop_reason = " << to_string(run.result.reason) << '\n';
    out << "iterations = " << run.result.iterations << '\n';
    out << "divergence_iter = "
        << (run.result.divergence_iter ? std::to_string(*run.result.divergence_iter) : "none")
        << '\n';
    out << "seed_used = " << run.seed_used << '\n';
    if (!run.records.empty()) {
        const TrajectoryRecord& last = run.records.back();
        out << "final_loss_avg = " << fmt17(last.loss_avg) << '\n';
        out << "final_grad_norm_avg = " << fmt17(last.grad_norm_avg) << '\n';
        out << "min_grad_so_far = " << fmt17(last.min_grad_so_far) << '\n';
    }
    out << "rho_R = " << fmt17(mix.rho_R) << '\n';
    out << "rho_C = " << fmt17(mix.rho_C) << '\n';
    out << "\n# mixing pair\n" << mix.to_text();
    out << "\n# resolved config (the remainder of this file re-runs this experiment)\n";
    out << dump_config(resolved);
}

double final_min_grad(const SingleRun& run) {
    return run.records.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : run.records.back().min_grad_so_far;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConnectivityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const WeightError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace

Eigen::MatrixXd initial_iterates(int n_agents, int dim, double scale, std::uint64_t seed) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n_agents, dim);
    if (scale == 0.0) return x;
    auto rng = rng::make(rng::derive(seed, 0x696e6974ULL)); // "init"
    for (int i = 0; i < n_agents; ++i)
        for (int j = 0; j < dim; j += 2) {
            const auto [a, b] = rng::normal_pair(rng);
            x(i, j) = scale * a;
            if (j + 1 < dim) x(i, j + 1) = scale * b;
        }
    return x;
}

std::string resolve_output_prefix(const std::string& prefix) {
    std::filesystem::path p(prefix);
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir && p.is_relative())
        p = std::filesystem::path(dir) / p;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p.string();
}

SingleRun execute_run(const ExperimentConfig& cfg, const MixingPair& mix,
                      const std::vector<LocalObjective>& objs, int repeat_index,
                      const std::string& output_prefix) {
    SingleRun out;
    out.seed_used = cfg.run.seed + static_cast<std::uint64_t>(repeat_index);
    const std::string prefix = cfg.run.repeat > 1
                                   ? output_prefix + "_r" + std::to_string(repeat_index)
                                   : output_prefix;
    out.csv_path = prefix + ".csv";
    out.meta_path = prefix + ".meta";

    const AlgoConfig acfg = resolve_algorithm(cfg, out.seed_used);
    const Eigen::MatrixXd x0 =
        initial_iterates(mix.n_agents, objs.front().dim(), cfg.run.init_scale, out.seed_used);

    std::ofstream csv(out.csv_path, std::ios::binary);
    if (!csv) throw IoError("cannot write " + out.csv_path);
    const CsvWriter writer(cfg.run.record_local_loss);
    writer.write_header(csv);

    out.result = run(x0, mix, objs, acfg, [&](const TrajectoryRecord& rec) {
        out.records.push_back(rec);
        writer.write_row(csv, rec);
    });
    csv.close();
    if (!csv) throw IoError("write failure on " + out.csv_path);

    write_meta(out.meta_path, resolved_for_meta(cfg, out.seed_used, prefix, acfg), mix, out);
    return out;
}

std::vector<SingleRun> run_config(const ExperimentConfig& cfg) {
    const MixingPair mix = build_mixing_pair(cfg.graph);
    const std::vector<LocalObjective> objs = build_objectives(cfg.objective, cfg.graph.n_agents);
    const std::string prefix = resolve_output_prefix(cfg.run.output);
    std::vector<SingleRun> runs;
    runs.reserve(static_cast<size_t>(cfg.run.repeat));
    for (int r = 0; r < cfg.run.repeat; ++r)
        runs.push_back(execute_run(cfg, mix, objs, r, prefix));
    return runs;
}

RateResult run_rate(const ExperimentConfig& base, const std::vector<long>& Ks) {
    if (Ks.size() < 3) throw ConfigError("rate.K", "need at least 3 budgets");
    for (std::size_t i = 1; i < Ks.size(); ++i)
        if (Ks[i] <= Ks[i - 1]) throw ConfigError("rate.K", "budgets must be strictly increasing");

    const MixingPair mix = build_mixing_pair(base.graph);
    const std::vector<LocalObjective> objs = build_objectives(base.objective, base.graph.n_agents);
    const std::string prefix = resolve_output_prefix(base.run.output);

    RateResult result;
    for (const long K : Ks) {
        ExperimentConfig cfg = base;
        cfg.algorithm.max_iters = K;
        cfg.c0_auto = true;
        cfg.run.repeat = 1;
        const SingleRun run = execute_run(cfg, mix, objs, 0, prefix + "_K" + std::to_string(K));
        result.points.push_back({K, 1.0 / std::sqrt(static_cast<double>(K)),
                                 final_min_grad(run), run.csv_path});
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(result.points.size());
    for (const RatePoint& p : result.points) {
        const double lx = std::log(static_cast<double>(p.K));
        const double ly = std::log(std::max(p.min_grad, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    result.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return result;
}

AlphaBoundDiagnostic alpha_bound_diagnostic(const MixingPair& mix,
                                            const std::vector<LocalObjective>& objs,
                                            const std::vector<TrajectoryRecord>& records,
                                            const ProbeSpec& probe, std::uint64_t seed) {
    AlphaBoundDiagnostic diag;
    for (const TrajectoryRecord& rec : records)
        diag.G_hat = std::max(diag.G_hat, rec.grad_norm_avg);

    const int d = objs.front().dim();
    const Eigen::VectorXd anchor = Eigen::VectorXd::Zero(d);
    std::vector<std::pair<double, double>> locals;
    const int n_samples = std::min(64, std::max(8, probe.n_samples));
    for (std::size_t i = 0; i < objs.size(); ++i) {
        const SmoothnessEstimate est = probe_smoothness(
            objs[i], anchor, probe.radius, n_samples, rng::derive(seed, 0xd1a6 + i));
        locals.emplace_back(est.L0_hat, est.L1_hat);
    }

    auto rng = rng::make(rng::derive(seed, 0xd155ULL));
    std::vector<Eigen::VectorXd> points;
    for (int t = 0; t < std::min(8, probe.n_points); ++t) {
        Eigen::VectorXd z(d);
        for (int j = 0; j < d; j += 2) {
            const auto [a, b] = rng::normal_pair(rng);
            z(j) = a;
            if (j + 1 < d) z(j + 1) = b;
        }
        points.push_back(anchor + probe.radius * z / std::sqrt(static_cast<double>(d)));
    }
    const DissimilarityEstimate dis = probe_dissimilarity(objs, points);
    diag.ell_hat = dis.ell_hat;
    diag.b_hat = dis.b_hat;
    std::tie(diag.L0_global, diag.L1_global) =
        combine_global_smoothness(locals, dis.ell_hat, dis.b_hat);

    const auto [A, B] = ab_constants(1.0);
    diag.L_hat = A * diag.L0_global + B * diag.L1_global * diag.G_hat;
    const double N = static_cast<double>(mix.n_agents);
    diag.bound = mix.u.dot(mix.v) / (9.0 * std::max(diag.L_hat, 1e-300) * N * mix.v.squaredNorm());
    return diag;
}

int cmd_run(const std::string& config_path, const CliOptions& opts, std::ostream& out,
            std::ostream& err) {
    return guarded(err, [&]() {
        ExperimentConfig cfg = load_config(config_path);
        if (opts.seed) cfg.run.seed = *opts.seed;
        if (opts.output) cfg.run.output = *opts.output;
        validate_config(cfg);

        const MixingPair mix = build_mixing_pair(cfg.graph);
        const std::vector<LocalObjective> objs =
            build_objectives(cfg.objective, cfg.graph.n_agents);
        const std::string prefix = resolve_output_prefix(cfg.run.output);
        for (int r = 0; r < cfg.run.repeat; ++r) {
            const SingleRun run = execute_run(cfg, mix, objs, r, prefix);
            if (!opts.quiet) {
                out << "run " << r << ": stop=" << to_string(run.result.reason)
                    << " iterations=" << run.result.iterations;
                if (run.result.divergence_iter)
                    out << " divergence_iter=" << *run.result.divergence_iter;
                if (!run.records.empty())
                    out << " final_loss=" << fmt17(run.records.back().loss_avg)
                        << " min_grad=" << fmt17(run.records.back().min_grad_so_far);
                out << "\n  csv=" << run.csv_path << " meta=" << run.meta_path << '\n';
                const AlphaBoundDiagnostic diag =
                    alpha_bound_diagnostic(mix, objs, run.records, cfg.probe, run.seed_used);
                out << "  stepsize hint: alpha <= " << fmt17(diag.bound)
                    << " (L_hat=" << fmt17(diag.L_hat) << ", G_hat=" << fmt17(diag.G_hat)
                    << ", alpha=" << fmt17(cfg.algorithm.alpha) << ")\n";
            }
        }
        return kExitOk;
    });
}

int cmd_graph(const GraphSpec& spec, const CliOptions& opts, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&]() {
        const MixingPair mix = build_mixing_pair(spec);
        const ValidationReport report = validate_assumption4(mix.R, mix.C);
        if (!opts.quiet) {
            out << report.summary();
            out << "u = [";
            for (int i = 0; i < mix.n_agents; ++i) out << (i ? " " : "") << fmt17(mix.u(i));
            out << "]\nv = [";
            for (int i = 0; i < mix.n_agents; ++i) out << (i ? " " : "") << fmt17(mix.v(i));
            out << "]\nrho_R = " << fmt17(mix.rho_R) << "\nrho_C = " << fmt17(mix.rho_C) << '\n';
        }
        return report.all_passed() ? kExitOk : kExitConfig;
    });
}

int cmd_probe(const std::string& config_path, const CliOptions& opts, std::ostream& out,
              std::ostream& err) {
    return guarded(err, [&]() {
        ExperimentConfig cfg = load_config(config_path);
        if (opts.seed) cfg.run.seed = *opts.seed;
        const std::vector<LocalObjective> objs =
            build_objectives(cfg.objective, cfg.graph.n_agents);
        const int d = objs.front().dim();
        const Eigen::VectorXd anchor = Eigen::VectorXd::Zero(d);

        std::vector<std::pair<double, double>> locals;
        for (std::size_t i = 0; i < objs.size(); ++i) {
            const SmoothnessEstimate est =
                probe_smoothness(objs[i], anchor, cfg.probe.radius, cfg.probe.n_samples,
                                 rng::derive(cfg.run.seed, 0x5e00 + i));
            locals.emplace_back(est.L0_hat, est.L1_hat);
            out << "agent " << (i + 1) << ": L0_hat = " << fmt17(est.L0_hat)
                << "  L1_hat = " << fmt17(est.L1_hat) << "  (samples=" << est.n_samples
                << ", max_residual=" << fmt17(est.max_residual)
                << (est.degenerate ? ", degenerate" : "") << ")\n";
        }

        auto rng = rng::make(rng::derive(cfg.run.seed, 0xd15eULL));
        std::vector<Eigen::VectorXd> points;
        for (int t = 0; t < cfg.probe.n_points; ++t) {
            Eigen::VectorXd z(d);
            for (int j = 0; j < d; j += 2) {
                const auto [a, b] = rng::normal_pair(rng);
                z(j) = a;
                if (j + 1 < d) z(j + 1) = b;
            }
            points.push_back(anchor + cfg.probe.radius * z / std::sqrt(static_cast<double>(d)));
        }
        const DissimilarityEstimate dis = probe_dissimilarity(objs, points);
        out << "dissimilarity: ell_hat = " << fmt17(dis.ell_hat)
            << "  b_hat = " << fmt17(dis.b_hat) << "  (points=" << dis.n_samples << ")\n";

        const auto [L0, L1] = combine_global_smoothness(locals, dis.ell_hat, dis.b_hat);
        out << "global: L0 = " << fmt17(L0) << "  L1 = " << fmt17(L1) << '\n';
        (void)opts;
        return kExitOk;
    });
}

int cmd_rate(const std::string& config_path, const std::vector<long>& Ks, const CliOptions& opts,
             std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        ExperimentConfig cfg = load_config(config_path);
        if (opts.seed) cfg.run.seed = *opts.seed;
        if (opts.output) cfg.run.output = *opts.output;
        const RateResult result = run_rate(cfg, Ks);
        out << "K,c0,min_grad_so_far\n";
        for (const RatePoint& p : result.points)
            out << p.K << ',' << fmt17(p.c0) << ',' << fmt17(p.min_grad) << '\n';
        out << "log-log slope = " << fmt17(result.slope) << '\n';
        return kExitOk;
    });
}

int cmd_compare(const std::vector<std::string>& config_paths, const CliOptions& opts,
                std::ostream& out, std::ostream& err) {
    return guarded(err, [&]() {
        if (config_paths.empty()) throw ConfigError("compare", "need at least one config file");
        const std::string prefix =
            resolve_output_prefix(opts.output.value_or(std::string("compare")));
        std::ofstream merged(prefix + ".csv", std::ios::binary);
        if (!merged) throw IoError("cannot write " + prefix + ".csv");
        const CsvWriter writer(false);
        merged << "algorithm," << writer.header() << '\n';

        std::vector<std::string> used_keys;
        for (const std::string& path : config_paths) {
            ExperimentConfig cfg = load_config(path);
            if (opts.seed) cfg.run.seed = *opts.seed;
            cfg.run.repeat = 1;
            const MixingPair mix = build_mixing_pair(cfg.graph);
            const std::vector<LocalObjective> objs =
                build_objectives(cfg.objective, cfg.graph.n_agents);
            const SingleRun run =
                execute_run(cfg, mix, objs, 0, resolve_output_prefix(cfg.run.output));

            std::string key = to_string(cfg.algorithm.algorithm);
            int suffix = 2;
            while (std::find(used_keys.begin(), used_keys.end(), key) != used_keys.end())
                key = std::string(to_string(cfg.algorithm.algorithm)) + "#" +
                      std::to_string(suffix++);
            used_keys.push_back(key);

            for (const TrajectoryRecord& rec : run.records)
                merged << key << ',' << writer.format_row(rec) << '\n';
            if (!opts.quiet)
                out << key << ": stop=" << to_string(run.result.reason)
                    << " iterations=" << run.result.iterations << '\n';
        }
        if (!opts.quiet) out << "merged csv: " << prefix << ".csv\n";
        return kExitOk;
    });
}

} // namespace cgt
