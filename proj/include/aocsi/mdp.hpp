#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aocsi/reward.hpp"

namespace aocsi {

struct DeltaMaxTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InstanceTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoStationary : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PolicyStateMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Transition {
    int next;
    double prob;
};

/// The belief MDP over (age, last observed state) pairs with the age
/// truncated at delta_max. States are enumerated age-major: index
/// (age - 1) * M + sigma. Idle and Transmit age the belief
/// deterministically (saturating at delta_max); Probe resets the age to 1
/// with the next observation distributed as the age-step state
/// distribution. Rewards are the expected per-slot rewards.
class TruncatedMdp {
public:
    TruncatedMdp(const StepMatrixCache& cache, const RewardParams& params, int delta_max);

    int delta_max() const { return delta_max_; }
    int num_channel_states() const { return static_cast<int>(model_.num_states()); }
    int num_states() const { return delta_max_ * num_channel_states(); }

    int index_of(AgedObservation obs) const {
        return (obs.age - 1) * num_channel_states() + obs.last_state;
    }
    AgedObservation state_at(int index) const {
        const int m = num_channel_states();
        return {index / m + 1, index % m};
    }

    const std::vector<Transition>& transitions(int state, ActionKind a) const {
        return kernel_[static_cast<int>(a)][state];
    }
    double reward(int state, ActionKind a) const {
        return rewards_[static_cast<int>(a)][state];
    }

    double expected_reliability(int state) const { return r_hat_[state]; }
    double mse(int state) const { return mse_[state]; }

    const ChannelModel& model() const { return model_; }
    const RewardParams& params() const { return params_; }

private:
    ChannelModel model_;
    RewardParams params_;
    int delta_max_;
    std::array<std::vector<std::vector<Transition>>, kNumActions> kernel_;
    std::array<std::vector<double>, kNumActions> rewards_;
    std::vector<double> r_hat_;
    std::vector<double> mse_;
};

TruncatedMdp build_mdp(const StepMatrixCache& cache, const RewardParams& params,
                       int delta_max);

enum class PolicyKind { Optimal, Greedy, Randomized };

const char* policy_kind_name(PolicyKind kind);

struct PolicyMetadata {
    double gain = 0.0;
    long iterations = 0;
    double theta = 0.0;
    int delta_max = 0;
    std::uint64_t config_hash = 0;
};

/// Action lookup table over belief states. Deterministic kinds fill
/// `actions`; Randomized fills `action_probs`. The table always covers
/// every state, reachable or not.
struct Policy {
    PolicyKind kind = PolicyKind::Optimal;
    std::vector<ActionKind> actions;
    std::vector<std::array<double, kNumActions>> action_probs;
    std::optional<PolicyMetadata> metadata;

    bool deterministic() const { return kind != PolicyKind::Randomized; }
    std::array<double, kNumActions> probs(int state) const;
};

struct SolverConfig {
    double theta = 1e-9;
    AgedObservation ref_state{1, 0};
    long max_iterations = 100000;
    /// Value-mixing factor in [0, 1); 0 reproduces the plain iteration.
    /// Escape hatch for chains where the undamped iteration cycles.
    double damping = 0.0;
    bool parallel = true;
};

struct SolveReport {
    Policy policy;
    double gain = 0.0;
    long iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
};

/// Relative value iteration. Iterates the Bellman operator, subtracts the
/// reference state's value each sweep, and stops when successive relative
/// values differ by less than theta in max norm. On hitting
/// max_iterations the partial policy is still returned with
/// converged = false.
SolveReport solve_rvi(const TruncatedMdp& mdp, const SolverConfig& config = {});

/// Statewise maximizer of the immediate reward.
Policy greedy_policy(const TruncatedMdp& mdp);

/// Uniform 1/3 over the three actions in every state.
Policy randomized_policy(const TruncatedMdp& mdp);

/// Exact long-run average reward of the chain a policy induces on the
/// belief MDP. The start distribution is (age 1, sigma) with sigma drawn
/// from the physical chain's stationary distribution; for policies whose
/// induced chain has several closed classes the gain is averaged under
/// the absorption probabilities from that start.
double evaluate_policy_exact(const TruncatedMdp& mdp, const Policy& policy);

struct BruteForceResult {
    Policy policy;
    double gain = 0.0;
};

/// Exhaustive enumeration of all 3^|S| deterministic stationary policies,
/// each scored with evaluate_policy_exact. Correctness oracle for small
/// instances; throws InstanceTooLarge beyond the guard.
BruteForceResult brute_force_optimal(const TruncatedMdp& mdp, long guard = 1000000);

struct ThresholdRecord {
    int last_state;
    int first_probe_age; ///< -1 when the policy never probes on this curve
    std::string actions; ///< one letter per age, e.g. "TTTTTTTC..."
    bool threshold_type;
};

struct ThresholdSummary {
    std::vector<ThresholdRecord> per_state;
};

/// Per last-observed-state probing structure of a deterministic policy.
/// threshold_type means: no probe before first_probe_age, probe at it and
/// at every larger age.
ThresholdSummary threshold_summary(const Policy& policy, const TruncatedMdp& mdp);

/// CSV: delta,last_state,action (deterministic) or
/// delta,last_state,p_idle,p_probe,p_transmit (stochastic).
void write_policy_csv(const Policy& policy, const TruncatedMdp& mdp, std::ostream& out);

} // namespace aocsi
