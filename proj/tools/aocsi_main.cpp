#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aocsi/experiments.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    long long horizon = -1;
    long long seed = -1;
    int delta_max = -1;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file")->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--horizon", opts.horizon, "override sim.horizon");
    cmd->add_option("--seed", opts.seed, "override sim.seed");
    cmd->add_option("--delta-max", opts.delta_max,
                    "override solver.delta_max (also the curves age bound)");
}

int run(const std::string& name, const CommonOpts& opts, const aocsi::RunOptions& ro) {
    aocsi::ExperimentConfig config;
    try {
        config = aocsi::load_config(opts.config_path);
        if (opts.horizon > 0) config.horizon = opts.horizon;
        if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
        if (opts.delta_max > 0) config.delta_max = opts.delta_max;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return aocsi::kExitConfigError;
    }
    aocsi::RunOptions options = ro;
    if (opts.delta_max > 0) options.curves_delta_max = opts.delta_max;
    return aocsi::run_subcommand(name, config, opts.out_dir, std::cout, options);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Age-aware CSI acquisition: belief curves, RVI policy solver, "
                 "policy benchmarks"};
    app.require_subcommand(1);

    const std::vector<std::string> names = {"validate", "curves", "solve",
                                            "policy-map", "compare", "simulate"};
    std::map<std::string, CommonOpts> opts;
    std::string sim_policy = "optimal";
    for (const std::string& name : names) {
        CLI::App* cmd = app.add_subcommand(name);
        add_common(cmd, opts[name]);
        if (name == "simulate") {
            cmd->add_option("--policy", sim_policy, "optimal|greedy|randomized")
                ->check(CLI::IsMember({"optimal", "greedy", "randomized"}));
        }
    }

    CLI11_PARSE(app, argc, argv);

    const std::string name = app.get_subcommands().front()->get_name();
    aocsi::RunOptions options;
    if (sim_policy == "greedy") options.sim_policy = aocsi::PolicyKind::Greedy;
    if (sim_policy == "randomized") options.sim_policy = aocsi::PolicyKind::Randomized;
    return run(name, opts[name], options);
}
