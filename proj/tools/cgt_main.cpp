#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "cgt/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Decentralized optimization over directed graphs with clipped gradient tracking"};
    app.require_subcommand(1);
    app.fallthrough();

    cgt::CliOptions opts;
    std::uint64_t seed_flag = 0;
    std::string output_flag;
    const auto seed_opt = app.add_option("--seed", seed_flag, "override the run seed");
    const auto output_opt = app.add_option("--output", output_flag, "override the output prefix");
    app.add_flag("--quiet", opts.quiet, "suppress informational output");

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "execute one experiment config");
    run_cmd->add_option("config", config_path, "experiment config file")->required();

    auto* graph_cmd = app.add_subcommand("graph", "build and validate a mixing pair");
    std::string graph_kind = "directed_ring";
    int graph_n = 0;
    double graph_density = 0.5;
    std::uint64_t graph_seed = 0;
    std::string graph_edges;
    std::string graph_config;
    graph_cmd->add_option("--kind", graph_kind, "directed_ring | random_strongly_connected | explicit");
    graph_cmd->add_option("--agents", graph_n, "number of agents");
    graph_cmd->add_option("--density", graph_density, "edge density for random graphs");
    graph_cmd->add_option("--graph-seed", graph_seed, "generator seed");
    graph_cmd->add_option("--edges", graph_edges, "explicit edges 'from to weight; ...'");
    graph_cmd->add_option("--config", graph_config, "read the [graph] section of a config file");

    auto* probe_cmd = app.add_subcommand("probe", "probe smoothness and dissimilarity constants");
    probe_cmd->add_option("config", config_path, "experiment config file")->required();

    auto* rate_cmd = app.add_subcommand("rate", "budget sweep with c0 = 1/sqrt(K)");
    std::vector<long> rate_Ks;
    rate_cmd->add_option("config", config_path, "base experiment config")->required();
    rate_cmd->add_option("--K", rate_Ks, "iteration budgets (>= 3, increasing)")
        ->required()
        ->delimiter(',');

    auto* compare_cmd = app.add_subcommand("compare", "run several configs into one long CSV");
    std::vector<std::string> compare_paths;
    compare_cmd->add_option("configs", compare_paths, "experiment config files")->required();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed = seed_flag;
    if (*output_opt) opts.output = output_flag;

    if (run_cmd->parsed()) return cgt::cmd_run(config_path, opts, std::cout, std::cerr);

    if (graph_cmd->parsed()) {
        cgt::GraphSpec spec;
        try {
            if (!graph_config.empty()) {
                spec = cgt::load_config(graph_config).graph;
            } else {
                if (graph_kind == "directed_ring") spec.kind = cgt::GraphKind::directed_ring;
                else if (graph_kind == "random_strongly_connected")
                    spec.kind = cgt::GraphKind::random_strongly_connected;
                else if (graph_kind == "explicit") spec.kind = cgt::GraphKind::explicit_edges;
                else {
                    std::cerr << "error: unknown graph kind '" << graph_kind << "'\n";
                    return cgt::kExitConfig;
                }
                spec.n_agents = graph_n;
                spec.density = graph_density;
                spec.seed = graph_seed;
                if (!graph_edges.empty()) {
                    std::istringstream cfg("[graph]\nkind = explicit\nn_agents = " +
                                           std::to_string(graph_n) + "\nedges = " + graph_edges +
                                           "\n");
                    spec.edges = cgt::parse_config(cfg, "--edges").graph.edges;
                }
            }
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return cgt::kExitConfig;
        }
        return cgt::cmd_graph(spec, opts, std::cout, std::cerr);
    }

    if (probe_cmd->parsed()) return cgt::cmd_probe(config_path, opts, std::cout, std::cerr);
    if (rate_cmd->parsed())
        return cgt::cmd_rate(config_path, rate_Ks, opts, std::cout, std::cerr);
    if (compare_cmd->parsed())
        return cgt::cmd_compare(compare_paths, opts, std::cout, std::cerr);
    return cgt::kExitConfig;
}
