#include "aocsi/channel.hpp"

#include <cmath>
#include <cstdio>

namespace aocsi {

namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr double kPowerIterTolerance = 1e-12;
constexpr long kPowerIterCap = 1000000;

std::string fmt(const char* format, auto... args) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

} // namespace

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    Matrix out(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = 0; k < n_; ++k) {
            const double a = (*this)(i, k);
            if (a == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                out(i, j) += a * rhs(k, j);
            }
        }
    }
    return out;
}

std::vector<double> Matrix::row(std::size_t i) const {
    return {data_.begin() + static_cast<std::ptrdiff_t>(i * n_),
            data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * n_)};
}

NonStochasticRow::NonStochasticRow(std::size_t row_, double sum_)
    : ModelError(fmt("transition row %zu sums to %.17g, expected 1", row_, sum_)),
      row(row_), sum(sum_) {}

NegativeEntry::NegativeEntry(std::size_t row_, std::size_t col_, double value_)
    : ModelError(fmt("transition entry (%zu, %zu) = %.17g is outside [0, 1]",
                     row_, col_, value_)),
      row(row_), col(col_), value(value_) {}

ReliabilityOutOfRange::ReliabilityOutOfRange(std::size_t index_, double value_)
    : ModelError(fmt("reliability[%zu] = %.17g is outside [0, 1]", index_, value_)),
      index(index_), value(value_) {}

DimensionMismatch::DimensionMismatch(const std::string& what) : ModelError(what) {}

NoUniqueStationary::NoUniqueStationary(const std::string& what) : ModelError(what) {}

ChannelModel::ChannelModel(Matrix transition, std::vector<double> reliability)
    : transition_(std::move(transition)), reliability_(std::move(reliability)) {
    const std::size_t m = reliability_.size();
    if (m < 2) {
        throw DimensionMismatch(fmt("need at least 2 channel states, got %zu", m));
    }
    if (transition_.size() != m) {
        throw DimensionMismatch(fmt("transition matrix is %zux%zu but %zu "
                                    "reliabilities were given",
                                    transition_.size(), transition_.size(), m));
    }
    for (std::size_t i = 0; i < m; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double p = transition_(i, j);
            if (!(p >= 0.0 && p <= 1.0)) throw NegativeEntry(i, j, p);
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) throw NonStochasticRow(i, sum);
    }
    for (std::size_t s = 0; s < m; ++s) {
        const double r = reliability_[s];
        if (!(r >= 0.0 && r <= 1.0)) throw ReliabilityOutOfRange(s, r);
    }
}

StepMatrixCache::StepMatrixCache(ChannelModel model, std::size_t horizon)
    : model_(std::move(model)) {
    powers_.reserve(horizon + 1);
    powers_.push_back(Matrix::identity(model_.num_states()));
    for (std::size_t n = 1; n <= horizon; ++n) {
        powers_.push_back(powers_.back() * model_.transition());
    }
}

Matrix StepMatrixCache::power(std::size_t n) const {
    if (n < powers_.size()) return powers_[n];
    Matrix m = powers_.back();
    for (std::size_t k = powers_.size() - 1; k < n; ++k) {
        m = m * model_.transition();
    }
    return m;
}

std::vector<double> StepMatrixCache::power_row(std::size_t n, std::size_t sigma) const {
    if (n < powers_.size()) return powers_[n].row(sigma);
    return power(n).row(sigma);
}

std::vector<double> steady_state(const ChannelModel& model) {
    const std::size_t m = model.num_states();
    const Matrix& p = model.transition();

    // Power-iterate from every basis vector; a unique stationary
    // distribution requires all limits to exist and coincide.
    std::vector<std::vector<double>> limits;
    for (std::size_t start = 0; start < m; ++start) {
        std::vector<double> mu(m, 0.0), next(m);
        mu[start] = 1.0;
        bool converged = false;
        for (long it = 0; it < kPowerIterCap; ++it) {
            for (std::size_t j = 0; j < m; ++j) {
                double acc = 0.0;
                for (std::size_t i = 0; i < m; ++i) acc += mu[i] * p(i, j);
                next[j] = acc;
            }
            double diff = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                diff = std::max(diff, std::abs(next[j] - mu[j]));
            }
            mu.swap(next);
            if (diff < kPowerIterTolerance) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NoUniqueStationary(
                fmt("power iteration from state %zu did not converge "
                    "(reducible or periodic chain)", start));
        }
        limits.push_back(mu);
    }
    for (std::size_t start = 1; start < m; ++start) {
        for (std::size_t j = 0; j < m; ++j) {
            if (std::abs(limits[start][j] - limits[0][j]) > 1e-9) {
                throw NoUniqueStationary(
                    fmt("stationary limit depends on the start state "
                        "(states %zu vs 0): chain is reducible", start));
            }
        }
    }

    std::vector<double>& pi = limits[0];
    double sum = 0.0;
    for (double v : pi) sum += v;
    for (double& v : pi) v /= sum;
    return pi;
}

} // namespace aocsi
