#include <doctest.h>

#include <cmath>

#include "aocsi/reward.hpp"

using namespace aocsi;

namespace {

RewardParams paper_params() { return {1.0, 0.0, 0.4, 0.3, 1.8}; }

StepMatrixCache paper_cache() {
    Matrix p(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) p(i, j) = i == j ? 0.8 : 0.1;
    }
    return StepMatrixCache(ChannelModel(p, {0.1, 0.5, 0.95}), 30);
}

} // namespace

TEST_CASE("action letters round-trip") {
    CHECK(action_letter(ActionKind::Idle) == 'I');
    CHECK(action_letter(ActionKind::Probe) == 'C');
    CHECK(action_letter(ActionKind::Transmit) == 'T');
    for (ActionKind a : {ActionKind::Idle, ActionKind::Probe, ActionKind::Transmit}) {
        CHECK(action_from_letter(action_letter(a)) == a);
    }
    CHECK_THROWS(action_from_letter('X'));
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(paper_params().validate());

    RewardParams bad = paper_params();
    bad.eps_c = 0.5; // probe dearer than transmit
    CHECK_THROWS_AS(bad.validate(), InvalidRewardParams);

    bad = paper_params();
    bad.eps_c = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidRewardParams);

    bad = paper_params();
    bad.beta = -0.1;
    CHECK_THROWS_AS(bad.validate(), InvalidRewardParams);

    bad = paper_params();
    bad.r_suc = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidRewardParams);
}

TEST_CASE("transmit reward") {
    const RewardParams params = paper_params();
    CHECK(transmit_reward(params, 0.82) == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(transmit_reward(params, 0.225) == doctest::Approx(-0.175).epsilon(1e-12));

    RewardParams flat = params;
    flat.r_suc = flat.r_fail = 0.7;
    CHECK(transmit_reward(flat, 0.0) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(transmit_reward(flat, 1.0) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("channel penalty") {
    const RewardParams params = paper_params();
    CHECK(channel_penalty(params, 0.0756, ActionKind::Transmit) ==
          doctest::Approx(-0.0756).epsilon(1e-12));
    CHECK(channel_penalty(params, 0.0756, ActionKind::Idle) ==
          doctest::Approx(-0.0756).epsilon(1e-12));
    CHECK(channel_penalty(params, 0.123, ActionKind::Probe) == -0.3);
    CHECK(channel_penalty(params, 0.0, ActionKind::Idle) == 0.0);
}

TEST_CASE("total reward examples") {
    const RewardParams params = paper_params();
    const auto cache = paper_cache();
    CHECK(total_reward(params, cache, {1, 2}, ActionKind::Transmit) ==
          doctest::Approx(0.28392).epsilon(1e-12));
    CHECK(total_reward(params, cache, {1, 0}, ActionKind::Idle) ==
          doctest::Approx(-0.130725).epsilon(1e-12));
}

TEST_CASE("probing costs the same from every state") {
    const RewardParams params = paper_params();
    const auto cache = paper_cache();
    for (int age = 1; age <= 30; ++age) {
        for (int sigma = 0; sigma < 3; ++sigma) {
            CHECK(total_reward(params, cache, {age, sigma}, ActionKind::Probe) ==
                  doctest::Approx(-0.54).epsilon(1e-12));
        }
    }
}

TEST_CASE("transmit minus idle equals the transmission payoff") {
    // The uncertainty penalty cancels, so the preference depends only on
    // the estimated reliability.
    const RewardParams params = paper_params();
    const auto cache = paper_cache();
    for (int age = 1; age <= 30; ++age) {
        for (int sigma = 0; sigma < 3; ++sigma) {
            const AgedObservation obs{age, sigma};
            const double diff = total_reward(params, cache, obs, ActionKind::Transmit) -
                                total_reward(params, cache, obs, ActionKind::Idle);
            const double direct =
                transmit_reward(params, expected_reliability(cache, obs));
            CHECK(std::abs(diff - direct) < 1e-12);
        }
    }
}

TEST_CASE("with beta zero, idle and probe rewards ignore the age") {
    RewardParams params = paper_params();
    params.beta = 0.0;
    const auto cache = paper_cache();
    for (int sigma = 0; sigma < 3; ++sigma) {
        const double idle1 = total_reward(params, cache, {1, sigma}, ActionKind::Idle);
        const double probe1 = total_reward(params, cache, {1, sigma}, ActionKind::Probe);
        CHECK(idle1 == 0.0);
        CHECK(probe1 == 0.0);
        for (int age = 2; age <= 30; ++age) {
            CHECK(total_reward(params, cache, {age, sigma}, ActionKind::Idle) == idle1);
            CHECK(total_reward(params, cache, {age, sigma}, ActionKind::Probe) == probe1);
        }
    }
}
