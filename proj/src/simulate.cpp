#include "aocsi/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "aocsi/csv.hpp"

namespace aocsi {

namespace {

// Uniform double in [0, 1) from the top 53 bits; bit-identical on any
// conforming platform, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int sample_categorical(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

ActionKind sample_action(const std::array<double, kNumActions>& probs, double u) {
    double acc = 0.0;
    for (int i = 0; i + 1 < kNumActions; ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<ActionKind>(i);
    }
    return static_cast<ActionKind>(kNumActions - 1);
}

} // namespace

SimReport run_simulation(const TruncatedMdp& mdp, const Policy& policy,
                         const SimConfig& sim) {
    const int n = mdp.num_states();
    const std::size_t table =
        policy.deterministic() ? policy.actions.size() : policy.action_probs.size();
    if (static_cast<int>(table) != n) {
        throw PolicyStateMissing("policy covers " + std::to_string(table) +
                                 " states, MDP has " + std::to_string(n));
    }

    const ChannelModel& model = mdp.model();
    const RewardParams& params = mdp.params();
    const int m = mdp.num_channel_states();

    std::vector<std::vector<double>> p_rows(m);
    for (int s = 0; s < m; ++s) p_rows[s] = model.transition().row(s);

    std::mt19937_64 rng(sim.seed);

    // Bootstrap: the state one slot before the first decision epoch is
    // drawn stationary and probed, so the first belief is (1, s0) and the
    // true state has advanced one step.
    const std::vector<double> pi = steady_state(model);
    const int s0 = sample_categorical(pi, uniform01(rng));
    int s_true = sample_categorical(p_rows[s0], uniform01(rng));
    AgedObservation belief{1, s0};

    SimReport report;
    report.aocsi_histogram.assign(mdp.delta_max() + 1, 0);
    report.transmit_attempts_by_state.assign(n, 0);
    report.transmit_successes_by_state.assign(n, 0);

    double sum = 0.0, sum_sq = 0.0;
    long long attempts = 0, successes = 0;

    for (long long t = 0; t < sim.horizon; ++t) {
        const int z = mdp.index_of(belief);
        const ActionKind action = policy.deterministic()
                                      ? policy.actions[z]
                                      : sample_action(policy.action_probs[z],
                                                      uniform01(rng));

        ++report.action_counts[static_cast<int>(action)];
        ++report.aocsi_histogram[belief.age];

        // Transmit outcome is drawn in both accounting modes so the two
        // modes walk identical trajectories under the same seed.
        bool success = false;
        if (action == ActionKind::Transmit) {
            success = uniform01(rng) < model.reliability(s_true);
            ++attempts;
            ++report.transmit_attempts_by_state[z];
            if (success) {
                ++successes;
                ++report.transmit_successes_by_state[z];
            }
        }

        double reward;
        if (sim.accounting == Accounting::Expected) {
            reward = mdp.reward(z, action);
        } else {
            const double err = model.reliability(s_true) - mdp.expected_reliability(z);
            switch (action) {
                case ActionKind::Probe:
                    reward = -params.beta * params.eps_c;
                    break;
                case ActionKind::Idle:
                    reward = -params.beta * err * err;
                    break;
                case ActionKind::Transmit:
                default:
                    reward = (success ? params.r_suc : params.r_fail) - params.eps_t -
                             params.beta * err * err;
                    break;
            }
        }
        if (t >= sim.warmup) {
            sum += reward;
            sum_sq += reward * reward;
        }

        if (action == ActionKind::Probe) {
            belief = {1, s_true};
        } else {
            belief.age = std::min(belief.age + 1, mdp.delta_max());
        }
        s_true = sample_categorical(p_rows[s_true], uniform01(rng));
    }

    const double count = static_cast<double>(sim.horizon - sim.warmup);
    report.average_reward = sum / count;
    const double variance =
        std::max(0.0, sum_sq / count - report.average_reward * report.average_reward);
    report.ci_halfwidth = 1.96 * std::sqrt(variance / count);
    report.transmit_success_rate =
        attempts > 0 ? static_cast<double>(successes) / static_cast<double>(attempts)
                     : 0.0;
    return report;
}

std::vector<ComparisonRow> compare_policies(const TruncatedMdp& mdp,
                                            const std::vector<Policy>& policies,
                                            const SimConfig& sim) {
    std::vector<ComparisonRow> rows;
    rows.reserve(policies.size());
    for (std::size_t i = 0; i < policies.size(); ++i) {
        SimConfig per_policy = sim;
        per_policy.seed = sim.seed + i;
        const SimReport report = run_simulation(mdp, policies[i], per_policy);
        rows.push_back({policy_kind_name(policies[i].kind), report.average_reward,
                        report.ci_halfwidth, evaluate_policy_exact(mdp, policies[i]),
                        report.action_counts, report.transmit_success_rate});
    }
    return rows;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out) {
    out << "policy,avg_reward,ci_halfwidth,exact_gain,n_idle,n_probe,n_transmit,"
           "success_rate\n";
    for (const ComparisonRow& row : rows) {
        out << row.policy << ',' << format_double(row.avg_reward) << ','
            << format_double(row.ci_halfwidth) << ',' << format_double(row.exact_gain)
            << ',' << row.action_counts[0] << ',' << row.action_counts[1] << ','
            << row.action_counts[2] << ',' << format_double(row.success_rate) << '\n';
    }
}

} // namespace aocsi
