// rumorsim: network generation, simulation runs, metrics and counterfactuals.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rumorsim/checkpoint.hpp"
#include "rumorsim/config.hpp"
#include "rumorsim/engine.hpp"
#include "rumorsim/error.hpp"
#include "rumorsim/metrics.hpp"
#include "rumorsim/network.hpp"
#include "rumorsim/trajectory.hpp"

namespace fs = std::filesystem;
using namespace rumorsim;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitAbort = 3;

struct GenOptions {
    std::string kind = "hcn";
    std::size_t nodes = 10'000;
    std::size_t m = 4;
    double p = 0.8;
    std::uint64_t seed = 42;
    std::size_t edges = 0;
    std::size_t path_samples = 2000;
    std::string out;
    std::string report;
};

int gen_network(GenOptions const& o)
{
    NetworkSpec spec;
    spec.nodes = o.nodes;
    spec.m = o.m;
    spec.p = o.p;
    spec.seed = o.seed;
    Graph g;
    if (o.kind == "hcn") {
        spec.hcn_config(o.seed).validate();
        g = build_hcn(spec.hcn_config(o.seed));
    } else if (o.kind == "random") {
        spec.hcn_config(o.seed).validate();
        g = build_random(o.nodes, o.edges ? o.edges : hcn_edge_count(spec.hcn_config(o.seed)), o.seed);
    } else {
        g = build_regular(o.nodes, o.m, o.seed);
    }
    save_graph(o.out, g);

    auto const stats = degree_stats(g, std::max<std::size_t>(o.m, 1));
    nlohmann::ordered_json report{
        {"kind", o.kind},
        {"nodes", g.node_count()},
        {"edges", g.edge_count()},
        {"mean_degree", g.node_count() ? 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count()) : 0.0},
        {"clustering", clustering_coefficient(g)},
        {"avg_path_length", g.edge_count() ? nlohmann::ordered_json(avg_path_length_sampled(g, o.path_samples, o.seed))
                                           : nlohmann::ordered_json(nullptr)},
        {"gamma", stats.powerlaw_exponent ? nlohmann::ordered_json(*stats.powerlaw_exponent) : nullptr},
        {"gamma_r2", stats.fit_r2 ? nlohmann::ordered_json(*stats.fit_r2) : nullptr},
    };
    auto const report_path = o.report.empty() ? o.out + ".stats.json" : o.report;
    std::ofstream(report_path) << report.dump(2) << '\n';
    std::cout << report.dump(2) << '\n';
    return 0;
}

TrajectoryLog run_to_dir(Simulation& sim, fs::path const& out)
{
    TrajectoryWriter writer(out);
    RunOptions options;
    options.on_step = [&](StepRecord const& r) { writer.write(r); };
    options.checkpoint_dir = (out / "checkpoints").string();
    auto log = sim.run(options);
    writer.finish(log.final_opinions);
    save_checkpoint(sim.checkpoint(), out / "checkpoint.bin");
    return log;
}

int run_command(std::string const& config_path, std::string const& out, std::string const& resume)
{
    std::optional<SimulationConfig> config;
    if (!config_path.empty()) {
        config = load_config(config_path);
    }
    if (resume.empty()) {
        if (!config) {
            throw ConfigError("run: --config is required unless --resume is given");
        }
        Simulation sim(*config);
        run_to_dir(sim, out);
    } else {
        auto sim = Simulation::resume(load_checkpoint(resume), config);
        run_to_dir(sim, out);
    }
    return 0;
}

int metrics_command(std::string const& sim_path, std::string const& real_path, std::string const& out)
{
    auto const sim = load_series(sim_path);
    auto const real = load_series(real_path);
    nlohmann::ordered_json j{
        {"delta_bias", delta_bias(sim, real)},
        {"delta_div", delta_div(sim, real)},
        {"dtw", dtw(sim, real)},
    };
    try {
        j["corr"] = pearson(sim.values, real.values);
    } catch (DomainError const&) {
        j["corr"] = nullptr;
    }
    auto const text = j.dump(2);
    if (!out.empty()) {
        std::ofstream(out) << text << '\n';
    }
    std::cout << text << '\n';
    return 0;
}

int counterfactual_command(std::string const& checkpoint_path, std::vector<std::string> const& specs,
                           std::string const& out, std::optional<Step> steps)
{
    auto const checkpoint = load_checkpoint(checkpoint_path);
    std::vector<std::pair<std::string, std::vector<InterventionSpec>>> variants{{"control", {}}};
    for (auto const& text : specs) {
        auto spec = parse_intervention_spec(text);
        if (spec.start_step < checkpoint.state.step) {
            throw ConfigError("intervention " + text + " starts before the checkpoint step "
                              + std::to_string(checkpoint.state.step));
        }
        variants.emplace_back(text, std::vector<InterventionSpec>{spec});
    }

    std::vector<std::string> names;
    std::vector<OpinionSeries> series;
    for (auto const& [name, interventions] : variants) {
        auto sim = Simulation::resume(checkpoint);
        if (steps) {
            sim.set_steps(*steps);
        }
        sim.set_interventions(interventions);
        auto dir_name = name;
        std::replace(dir_name.begin(), dir_name.end(), '@', '_');
        std::replace(dir_name.begin(), dir_name.end(), ':', '_');
        std::replace(dir_name.begin(), dir_name.end(), '=', '-');
        std::replace(dir_name.begin(), dir_name.end(), ',', '_');
        auto const log = run_to_dir(sim, fs::path(out) / dir_name);
        names.push_back(name);
        series.push_back(mean_series(log.steps));
    }

    std::ofstream csv(fs::path(out) / "comparison.csv");
    csv << "step";
    for (auto const& n : names) {
        csv << ',' << n;
    }
    csv << '\n';
    char buf[64];
    for (std::size_t i = 0; i < series.front().size(); ++i) {
        csv << series.front().steps[i];
        for (auto const& s : series) {
            std::snprintf(buf, sizeof buf, "%.17g", s.values[i]);
            csv << ',' << buf;
        }
        csv << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Rumor spread simulation with adaptive agent grouping"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-network", "Generate a network and report its statistics");
    gen_cmd->add_option("--kind", gen.kind, "hcn, random or regular")
        ->check(CLI::IsMember({"hcn", "random", "regular"}));
    gen_cmd->add_option("--nodes", gen.nodes, "Number of nodes")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--m", gen.m, "Edges per new node (hcn); degree k (regular)");
    gen_cmd->add_option("--p", gen.p, "Preferential attachment probability")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen.seed, "Random seed");
    gen_cmd->add_option("--edges", gen.edges, "Edge count for random graphs (default: the hcn edge count)");
    gen_cmd->add_option("--path-samples", gen.path_samples, "Node pairs sampled for the path length");
    gen_cmd->add_option("--out", gen.out, "Graph file")->required();
    gen_cmd->add_option("--report", gen.report, "Stats report (default: <out>.stats.json)");

    std::string config_path;
    std::string run_out;
    std::string resume;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation");
    run_cmd->add_option("--config", config_path, "Configuration JSON");
    run_cmd->add_option("--out", run_out, "Output directory")->required();
    run_cmd->add_option("--resume", resume, "Checkpoint to resume from");

    std::string sim_path;
    std::string real_path;
    std::string metrics_out;
    auto* metrics_cmd = app.add_subcommand("metrics", "Compare a simulated and a real mean-opinion series");
    metrics_cmd->add_option("--sim", sim_path, "Simulated series CSV")->required();
    metrics_cmd->add_option("--real", real_path, "Real series CSV")->required();
    metrics_cmd->add_option("--out", metrics_out, "Also write the JSON here");

    std::string checkpoint_path;
    std::vector<std::string> interventions;
    std::string cf_out;
    std::optional<Step> cf_steps;
    auto* cf_cmd = app.add_subcommand("counterfactual", "Resume a checkpoint under alternative interventions");
    cf_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
    cf_cmd->add_option("--intervention", interventions, "kind@start[:score=x,leader=id], repeatable");
    cf_cmd->add_option("--out", cf_out, "Output directory")->required();
    cf_cmd->add_option("--steps", cf_steps, "Horizon override");

    try {
        app.parse(argc, argv);
    } catch (CLI::CallForHelp const& e) {
        return app.exit(e);
    } catch (CLI::CallForAllHelp const& e) {
        return app.exit(e);
    } catch (CLI::ParseError const& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*gen_cmd) {
            return gen_network(gen);
        }
        if (*run_cmd) {
            return run_command(config_path, run_out, resume);
        }
        if (*metrics_cmd) {
            return metrics_command(sim_path, real_path, metrics_out);
        }
        if (*cf_cmd) {
            return counterfactual_command(checkpoint_path, interventions, cf_out, cf_steps);
        }
    } catch (RunAbort const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAbort;
    } catch (ConfigError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (CheckpointError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (AlignmentError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (DomainError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (std::exception const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitAbort;
    }
    return kExitUsage;
}
