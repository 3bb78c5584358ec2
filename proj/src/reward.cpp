#include "aocsi/reward.hpp"

namespace aocsi {

char action_letter(ActionKind a) {
    switch (a) {
        case ActionKind::Idle: return 'I';
        case ActionKind::Probe: return 'C';
        case ActionKind::Transmit: return 'T';
    }
    return '?';
}

ActionKind action_from_letter(char c) {
    switch (c) {
        case 'I': return ActionKind::Idle;
        case 'C': return ActionKind::Probe;
        case 'T': return ActionKind::Transmit;
    }
    throw std::invalid_argument(std::string("unknown action letter: ") + c);
}

void RewardParams::validate() const {
    if (!(eps_c > 0.0 && eps_c < eps_t)) {
        throw InvalidRewardParams("reward costs must satisfy 0 < eps_c < eps_t");
    }
    if (!(beta >= 0.0)) {
        throw InvalidRewardParams("beta must be >= 0");
    }
    if (!(r_suc >= r_fail)) {
        throw InvalidRewardParams("r_suc must be >= r_fail");
    }
}

double transmit_reward(const RewardParams& params, double r_hat) {
    return r_hat * params.r_suc + (1.0 - r_hat) * params.r_fail - params.eps_t;
}

double channel_penalty(const RewardParams& params, double mse, ActionKind action) {
    return action == ActionKind::Probe ? -params.eps_c : -mse;
}

double total_reward(const RewardParams& params, const StepMatrixCache& cache,
                    AgedObservation obs, ActionKind action) {
    const double penalty = action == ActionKind::Probe
                               ? -params.eps_c
                               : -reliability_mse(cache, obs);
    double r = params.beta * penalty;
    if (action == ActionKind::Transmit) {
        r += transmit_reward(params, expected_reliability(cache, obs));
    }
    return r;
}

} // namespace aocsi
