#include "aocsi/experiments.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "aocsi/belief.hpp"
#include "aocsi/csv.hpp"

namespace aocsi {

namespace {

namespace fs = std::filesystem;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tracks files written by one subcommand run; on failure everything
// created so far is removed so no partial outputs survive.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

    std::ofstream open(const std::string& name) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + path.string());
        created_.push_back(path);
        return out;
    }

    void discard_all() {
        std::error_code ec;
        for (const fs::path& path : created_) fs::remove(path, ec);
    }

private:
    fs::path dir_;
    std::vector<fs::path> created_;
};

void write_thresholds(const std::vector<std::pair<std::string, ThresholdSummary>>& all,
                      std::ostream& out) {
    out << "policy,last_state,first_probe_age,threshold_type,actions\n";
    for (const auto& [name, summary] : all) {
        for (const ThresholdRecord& record : summary.per_state) {
            out << name << ',' << record.last_state << ',' << record.first_probe_age
                << ',' << (record.threshold_type ? 1 : 0) << ',' << record.actions
                << '\n';
        }
    }
}

void write_solve_report(const SolveReport& report, const ThresholdSummary& thresholds,
                        std::ostream& out) {
    out << "gain,iterations,final_residual,converged";
    for (const ThresholdRecord& record : thresholds.per_state) {
        out << ",first_probe_age_" << record.last_state;
    }
    out << '\n';
    out << format_double(report.gain) << ',' << report.iterations << ','
        << format_double(report.final_residual) << ',' << (report.converged ? 1 : 0);
    for (const ThresholdRecord& record : thresholds.per_state) {
        out << ',' << record.first_probe_age;
    }
    out << '\n';
}

SolverConfig solver_config(const ExperimentConfig& config) {
    return {config.theta, config.ref_state, config.max_iterations, config.damping, true};
}

SimConfig sim_config(const ExperimentConfig& config) {
    return {config.horizon, config.seed, config.warmup, config.accounting};
}

int run_impl(const std::string& name, const ExperimentConfig& config,
             OutputSet& outputs, std::ostream& log, const RunOptions& options) {
    ChannelModel model(config.transition, config.reliabilities);
    const int curves_bound =
        options.curves_delta_max > 0 ? options.curves_delta_max : config.delta_max;
    StepMatrixCache cache(model, static_cast<std::size_t>(
                                     std::max(config.delta_max, curves_bound)));

    if (name == "validate") {
        log << "channel states: " << model.num_states() << "\n";
        const std::vector<double> pi = steady_state(model);
        log << "steady state:";
        for (double p : pi) log << ' ' << format_double(p);
        log << "\nsteady-state reliability: ";
        double r_bar = 0.0;
        for (std::size_t s = 0; s < pi.size(); ++s) r_bar += pi[s] * model.reliability(s);
        log << format_double(r_bar) << "\n";
        return kExitOk;
    }

    if (name == "curves") {
        const AgeCurveTable table = age_curves(cache, curves_bound);
        auto out = outputs.open("curves.csv");
        write_csv(table, out);
        return kExitOk;
    }

    const TruncatedMdp mdp(cache, config.reward, config.delta_max);

    if (name == "solve" || name == "policy-map") {
        SolveReport report = solve_rvi(mdp, solver_config(config));
        if (report.policy.metadata) report.policy.metadata->config_hash = config.hash();
        const ThresholdSummary optimal_thresholds =
            threshold_summary(report.policy, mdp);
        {
            auto out = outputs.open("policy_optimal.csv");
            write_policy_csv(report.policy, mdp, out);
        }
        if (name == "solve") {
            auto out = outputs.open("solve_report.csv");
            write_solve_report(report, optimal_thresholds, out);
        } else {
            const Policy greedy = greedy_policy(mdp);
            auto out = outputs.open("policy_greedy.csv");
            write_policy_csv(greedy, mdp, out);
            auto thresholds_out = outputs.open("thresholds.csv");
            write_thresholds({{"optimal", optimal_thresholds},
                              {"greedy", threshold_summary(greedy, mdp)}},
                             thresholds_out);
        }
        return report.converged ? kExitOk : kExitNotConverged;
    }

    if (name == "compare") {
        const SolveReport report = solve_rvi(mdp, solver_config(config));
        const std::vector<Policy> policies = {report.policy, greedy_policy(mdp),
                                              randomized_policy(mdp)};
        const std::vector<ComparisonRow> rows =
            compare_policies(mdp, policies, sim_config(config));
        auto out = outputs.open("comparison.csv");
        write_comparison_csv(rows, out);
        return report.converged ? kExitOk : kExitNotConverged;
    }

    if (name == "simulate") {
        Policy policy;
        bool converged = true;
        switch (options.sim_policy) {
            case PolicyKind::Optimal: {
                const SolveReport report = solve_rvi(mdp, solver_config(config));
                policy = report.policy;
                converged = report.converged;
                break;
            }
            case PolicyKind::Greedy:
                policy = greedy_policy(mdp);
                break;
            case PolicyKind::Randomized:
                policy = randomized_policy(mdp);
                break;
        }
        const SimReport report = run_simulation(mdp, policy, sim_config(config));
        const std::vector<ComparisonRow> rows = {
            {policy_kind_name(policy.kind), report.average_reward, report.ci_halfwidth,
             evaluate_policy_exact(mdp, policy), report.action_counts,
             report.transmit_success_rate}};
        auto out = outputs.open("sim_report.csv");
        write_comparison_csv(rows, out);
        return converged ? kExitOk : kExitNotConverged;
    }

    log << "unknown subcommand: " << name << "\n";
    return kExitConfigError;
}

} // namespace

int run_subcommand(const std::string& name, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log,
                   const RunOptions& options) {
    OutputSet outputs(out_dir);
    try {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        return run_impl(name, config, outputs, log, options);
    } catch (const IoError& e) {
        outputs.discard_all();
        log << "error: " << e.what() << "\n";
        return kExitIoError;
    } catch (const std::exception& e) {
        outputs.discard_all();
        log << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
}

} // namespace aocsi
