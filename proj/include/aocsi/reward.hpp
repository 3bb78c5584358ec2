#pragma once

#include <stdexcept>

#include "aocsi/belief.hpp"
#include "aocsi/channel.hpp"

namespace aocsi {

/// The three actions available at every decision epoch. The integer
/// encoding is stable and used for serialization.
enum class ActionKind : int { Idle = 0, Probe = 1, Transmit = 2 };

inline constexpr int kNumActions = 3;

char action_letter(ActionKind a);
ActionKind action_from_letter(char c);

struct InvalidRewardParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Reward surface parameters. Idling is cost-free; the probe cost sits
/// inside the uncertainty penalty term and is therefore scaled by beta.
struct RewardParams {
    double r_suc;
    double r_fail;
    double eps_t;
    double eps_c;
    double beta;

    /// Enforces 0 < eps_c < eps_t, beta >= 0, r_suc >= r_fail.
    void validate() const;
};

/// Expected one-slot transmission payoff at estimated reliability r_hat:
/// r_hat*r_suc + (1 - r_hat)*r_fail - eps_t. Zero for the other actions.
double transmit_reward(const RewardParams& params, double r_hat);

/// Uncertainty penalty: -mse when idling or transmitting, -eps_c when
/// probing. Always <= 0.
double channel_penalty(const RewardParams& params, double mse, ActionKind action);

/// Total per-slot reward R(z, a) = R_T + beta * R_C.
double total_reward(const RewardParams& params, const StepMatrixCache& cache,
                    AgedObservation obs, ActionKind action);

} // namespace aocsi
