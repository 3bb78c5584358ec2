#pragma once

#include <iosfwd>
#include <vector>

#include "aocsi/channel.hpp"

namespace aocsi {

/// The transmitter's knowledge state: how many slots ago the channel was
/// last probed (age >= 1) and which state was measured then.
struct AgedObservation {
    int age;
    int last_state;

    friend bool operator==(const AgedObservation&, const AgedObservation&) = default;
};

/// Pr[s[t] = . | last probe age slots ago measured last_state].
std::vector<double> state_distribution(const StepMatrixCache& cache, AgedObservation obs);

/// Expected packet success probability under the age-conditioned state
/// distribution: r_hat = sum_s p[s] r(s).
double expected_reliability(const StepMatrixCache& cache, AgedObservation obs);

/// Conditional variance of r(s[t]) given the observation,
/// sum_s p[s] (r(s) - r_hat)^2.
double reliability_mse(const StepMatrixCache& cache, AgedObservation obs);

struct AgeCurveRow {
    int delta;
    int last_state;
    double expected_reliability;
    double mse;
};

/// Reliability and MSE trajectories per (age, last observed state).
struct AgeCurveTable {
    std::vector<AgeCurveRow> rows;
};

AgeCurveTable age_curves(const StepMatrixCache& cache, int delta_max);

/// CSV with header delta,last_state,expected_reliability,mse.
void write_csv(const AgeCurveTable& table, std::ostream& out);

} // namespace aocsi
