#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "aocsi/belief.hpp"

using namespace aocsi;

namespace {

Matrix paper_transition() {
    Matrix p(3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) p(i, j) = i == j ? 0.8 : 0.1;
    }
    return p;
}

StepMatrixCache paper_cache(std::size_t horizon = 30) {
    return StepMatrixCache(ChannelModel(paper_transition(), {0.1, 0.5, 0.95}), horizon);
}

Matrix random_stochastic(std::mt19937_64& rng, std::size_t m) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    Matrix p(m);
    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            p(i, j) = u(rng);
            sum += p(i, j);
        }
        for (std::size_t j = 0; j < m; ++j) p(i, j) /= sum;
    }
    return p;
}

} // namespace

TEST_CASE("state distribution at age one is the transition row") {
    const auto cache = paper_cache();
    const std::vector<double> p = state_distribution(cache, {1, 2});
    CHECK(p[0] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("state distribution at age two") {
    const auto cache = paper_cache();
    const std::vector<double> p = state_distribution(cache, {2, 0});
    CHECK(p[0] == doctest::Approx(0.66).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.17).epsilon(1e-12));
    CHECK(p[2] == doctest::Approx(0.17).epsilon(1e-12));
}

TEST_CASE("frozen channel keeps the observed state forever") {
    StepMatrixCache cache(ChannelModel(Matrix::identity(2), {0.2, 0.9}), 10);
    for (int age = 1; age <= 10; ++age) {
        const std::vector<double> p = state_distribution(cache, {age, 0});
        CHECK(p[0] == 1.0);
        CHECK(p[1] == 0.0);
    }
}

TEST_CASE("expected reliability examples") {
    const auto cache = paper_cache();
    CHECK(expected_reliability(cache, {1, 2}) == doctest::Approx(0.82).epsilon(1e-12));
    CHECK(expected_reliability(cache, {1, 0}) == doctest::Approx(0.225).epsilon(1e-12));
    for (int sigma = 0; sigma < 3; ++sigma) {
        CHECK(std::abs(expected_reliability(cache, {30, sigma}) - 0.516667) < 1e-3);
    }
}

TEST_CASE("reliability mse examples") {
    const auto cache = paper_cache();
    // 0.1*(0.1-0.82)^2 + 0.1*(0.5-0.82)^2 + 0.8*(0.95-0.82)^2
    CHECK(reliability_mse(cache, {1, 2}) == doctest::Approx(0.0756).epsilon(1e-12));
    for (int sigma = 0; sigma < 3; ++sigma) {
        CHECK(std::abs(reliability_mse(cache, {30, sigma}) - 0.120556) < 1e-3);
    }
}

TEST_CASE("equal reliabilities give zero mse") {
    std::mt19937_64 rng(3);
    StepMatrixCache cache(ChannelModel(random_stochastic(rng, 3), {0.4, 0.4, 0.4}), 10);
    for (int age = 1; age <= 10; ++age) {
        CHECK(reliability_mse(cache, {age, 1}) == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("mse matches the second-moment form") {
    // sum p r^2 - r_hat^2, checked against the centered formulation.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + trial % 3;
        std::vector<double> r(m);
        for (double& x : r) x = u(rng);
        StepMatrixCache cache(ChannelModel(random_stochastic(rng, m), r), 20);
        for (int age = 1; age <= 20; ++age) {
            for (int sigma = 0; sigma < static_cast<int>(m); ++sigma) {
                const AgedObservation obs{age, sigma};
                const std::vector<double> p = state_distribution(cache, obs);
                double moment = 0.0, mean = 0.0;
                for (std::size_t s = 0; s < m; ++s) {
                    moment += p[s] * r[s] * r[s];
                    mean += p[s] * r[s];
                }
                CHECK(std::abs(reliability_mse(cache, obs) -
                               (moment - mean * mean)) < 1e-12);
            }
        }
    }
}

TEST_CASE("reliability stays within the per-state range") {
    const auto cache = paper_cache();
    for (int age = 1; age <= 30; ++age) {
        for (int sigma = 0; sigma < 3; ++sigma) {
            const double r = expected_reliability(cache, {age, sigma});
            CHECK(r >= 0.1);
            CHECK(r <= 0.95);
        }
    }
}

TEST_CASE("curves converge to the ergodic limit regardless of last state") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + trial % 3;
        std::vector<double> r(m);
        for (double& x : r) x = u(rng);
        ChannelModel model(random_stochastic(rng, m), r);
        StepMatrixCache cache(model, 200);

        const std::vector<double> pi = steady_state(model);
        double mean = 0.0;
        for (std::size_t s = 0; s < m; ++s) mean += pi[s] * r[s];
        double var = 0.0;
        for (std::size_t s = 0; s < m; ++s) {
            var += pi[s] * (r[s] - mean) * (r[s] - mean);
        }

        for (int sigma = 0; sigma < static_cast<int>(m); ++sigma) {
            CHECK(std::abs(expected_reliability(cache, {200, sigma}) - mean) < 1e-6);
            CHECK(std::abs(reliability_mse(cache, {200, sigma}) - var) < 1e-6);
        }
    }
}

TEST_CASE("age curve table shape and bounds") {
    const auto cache = paper_cache();
    const AgeCurveTable table = age_curves(cache, 30);
    REQUIRE(table.rows.size() == 90);
    for (const AgeCurveRow& row : table.rows) {
        CHECK(row.expected_reliability >= 0.0);
        CHECK(row.expected_reliability <= 1.0);
        CHECK(row.mse >= 0.0);
        CHECK(row.mse <= 0.25);
    }
    // (delta=2, sigma=2): (0.17, 0.17, 0.66) . (0.1, 0.5, 0.95)
    const AgeCurveRow& row = table.rows[1 * 3 + 2];
    CHECK(row.delta == 2);
    CHECK(row.last_state == 2);
    CHECK(row.expected_reliability == doctest::Approx(0.729).epsilon(1e-12));
}

TEST_CASE("reliability trajectories are monotone toward the mean") {
    const auto cache = paper_cache(14);
    for (int age = 1; age < 14; ++age) {
        const double from_best = expected_reliability(cache, {age, 2});
        const double from_best_next = expected_reliability(cache, {age + 1, 2});
        CHECK(from_best_next <= from_best + 1e-12);

        const double from_worst = expected_reliability(cache, {age, 0});
        const double from_worst_next = expected_reliability(cache, {age + 1, 0});
        CHECK(from_worst_next >= from_worst - 1e-12);
    }
}

TEST_CASE("frozen channel curves are flat with zero mse") {
    StepMatrixCache cache(ChannelModel(Matrix::identity(2), {0.2, 0.9}), 10);
    const AgeCurveTable table = age_curves(cache, 10);
    for (const AgeCurveRow& row : table.rows) {
        CHECK(row.expected_reliability == (row.last_state == 0 ? 0.2 : 0.9));
        CHECK(row.mse == 0.0);
    }
}

TEST_CASE("curve csv header and row count") {
    const auto cache = paper_cache(3);
    std::ostringstream out;
    write_csv(age_curves(cache, 3), out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "delta,last_state,expected_reliability,mse");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 9);
}
