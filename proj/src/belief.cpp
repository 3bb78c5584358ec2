#include "aocsi/belief.hpp"

#include <cassert>
#include <ostream>

#include "aocsi/csv.hpp"

namespace aocsi {

std::vector<double> state_distribution(const StepMatrixCache& cache, AgedObservation obs) {
    assert(obs.age >= 1);
    assert(obs.last_state >= 0 &&
           obs.last_state < static_cast<int>(cache.model().num_states()));
    return cache.power_row(static_cast<std::size_t>(obs.age),
                           static_cast<std::size_t>(obs.last_state));
}

double expected_reliability(const StepMatrixCache& cache, AgedObservation obs) {
    const std::vector<double> p = state_distribution(cache, obs);
    const std::vector<double>& r = cache.model().reliability();
    double r_hat = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) r_hat += p[s] * r[s];
    return r_hat;
}

double reliability_mse(const StepMatrixCache& cache, AgedObservation obs) {
    const std::vector<double> p = state_distribution(cache, obs);
    const std::vector<double>& r = cache.model().reliability();
    double r_hat = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) r_hat += p[s] * r[s];
    double mse = 0.0;
    for (std::size_t s = 0; s < p.size(); ++s) {
        const double d = r[s] - r_hat;
        mse += p[s] * d * d;
    }
    return mse;
}

AgeCurveTable age_curves(const StepMatrixCache& cache, int delta_max) {
    assert(delta_max >= 1);
    const int m = static_cast<int>(cache.model().num_states());
    AgeCurveTable table;
    table.rows.reserve(static_cast<std::size_t>(delta_max) * m);
    for (int delta = 1; delta <= delta_max; ++delta) {
        for (int sigma = 0; sigma < m; ++sigma) {
            const AgedObservation obs{delta, sigma};
            table.rows.push_back({delta, sigma, expected_reliability(cache, obs),
                                  reliability_mse(cache, obs)});
        }
    }
    return table;
}

void write_csv(const AgeCurveTable& table, std::ostream& out) {
    out << "delta,last_state,expected_reliability,mse\n";
    for (const AgeCurveRow& row : table.rows) {
        out << row.delta << ',' << row.last_state << ','
            << format_double(row.expected_reliability) << ','
            << format_double(row.mse) << '\n';
    }
}

} // namespace aocsi
