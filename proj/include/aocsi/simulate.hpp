#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aocsi/mdp.hpp"

namespace aocsi {

/// Whether per-slot rewards use the belief-conditional expected reward
/// R(z, a) or the realized outcome (success indicator, realized squared
/// estimation error). Expected is the literal objective; Realized is the
/// sample-path counterpart with the same conditional mean.
enum class Accounting { Expected, Realized };

struct SimConfig {
    long long horizon;
    std::uint64_t seed;
    long long warmup = 0;
    Accounting accounting = Accounting::Expected;
};

struct SimReport {
    double average_reward = 0.0;
    /// 95% normal-approximation half-width over per-slot rewards.
    /// Indicative only: slots are serially correlated.
    double ci_halfwidth = 0.0;
    std::array<long long, kNumActions> action_counts{};
    double transmit_success_rate = 0.0;
    /// Counts per age value observed at decision epochs; index 0 unused.
    std::vector<long long> aocsi_histogram;
    /// Transmit attempts / successes per belief state (MDP state index).
    std::vector<long long> transmit_attempts_by_state;
    std::vector<long long> transmit_successes_by_state;
};

/// Runs a policy against the true hidden channel for sim.horizon slots.
/// The channel starts from its stationary distribution and the
/// transmitter bootstraps with one probe, so the first decision epoch
/// sees belief (age 1, initial state). Identical (seed, config) runs
/// produce bit-identical reports; the generator is std::mt19937_64 with
/// uniform doubles taken as (rng() >> 11) * 2^-53, so streams are
/// reproducible across platforms.
SimReport run_simulation(const TruncatedMdp& mdp, const Policy& policy,
                         const SimConfig& sim);

struct ComparisonRow {
    std::string policy;
    double avg_reward;
    double ci_halfwidth;
    double exact_gain;
    std::array<long long, kNumActions> action_counts;
    double success_rate;
};

/// One simulation plus one exact evaluation per policy. Simulation i uses
/// seed sim.seed + i.
std::vector<ComparisonRow> compare_policies(const TruncatedMdp& mdp,
                                            const std::vector<Policy>& policies,
                                            const SimConfig& sim);

/// CSV with header
/// policy,avg_reward,ci_halfwidth,exact_gain,n_idle,n_probe,n_transmit,success_rate.
void write_comparison_csv(const std::vector<ComparisonRow>& rows, std::ostream& out);

} // namespace aocsi
