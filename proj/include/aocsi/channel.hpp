#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace aocsi {

/// Dense square matrix, row-major.
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }

    Matrix operator*(const Matrix& rhs) const;

    std::vector<double> row(std::size_t i) const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct ModelError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonStochasticRow : ModelError {
    NonStochasticRow(std::size_t row, double sum);
    std::size_t row;
    double sum;
};

struct NegativeEntry : ModelError {
    NegativeEntry(std::size_t row, std::size_t col, double value);
    std::size_t row, col;
    double value;
};

struct ReliabilityOutOfRange : ModelError {
    ReliabilityOutOfRange(std::size_t index, double value);
    std::size_t index;
    double value;
};

struct DimensionMismatch : ModelError {
    explicit DimensionMismatch(const std::string& what);
};

struct NoUniqueStationary : ModelError {
    explicit NoUniqueStationary(const std::string& what);
};

/// Hidden M-state Markov channel. The transition matrix is row-stochastic:
/// entry (i, j) = Pr[s[t+1] = j | s[t] = i], so Pr[s[t] = j | s[t-d] = i]
/// is entry (i, j) of the d-th matrix power. Each state carries a fixed
/// packet success probability r(s).
///
/// Validation is strict: a row whose sum is off by more than 1e-9 is
/// rejected, never renormalized.
class ChannelModel {
public:
    ChannelModel(Matrix transition, std::vector<double> reliability);

    std::size_t num_states() const { return reliability_.size(); }
    const Matrix& transition() const { return transition_; }
    const std::vector<double>& reliability() const { return reliability_; }
    double reliability(std::size_t s) const { return reliability_[s]; }

private:
    Matrix transition_;
    std::vector<double> reliability_;
};

/// Eagerly computed matrix powers P^0 .. P^horizon. Immutable after
/// construction and safe to share across threads. Queries beyond the
/// horizon are computed on the fly from the highest cached power.
class StepMatrixCache {
public:
    StepMatrixCache(ChannelModel model, std::size_t horizon);

    const ChannelModel& model() const { return model_; }
    std::size_t horizon() const { return powers_.size() - 1; }

    /// P^n; O(1) for n <= horizon.
    Matrix power(std::size_t n) const;

    /// Row sigma of P^n, i.e. the state distribution n steps after
    /// observing state sigma.
    std::vector<double> power_row(std::size_t n, std::size_t sigma) const;

private:
    ChannelModel model_;
    std::vector<Matrix> powers_;
};

/// Unique stationary distribution of the chain, found by power iteration
/// from every basis vector (stops at max-norm difference < 1e-12).
/// Throws NoUniqueStationary when iteration fails to converge or the
/// per-start limits disagree (reducible or periodic chain).
std::vector<double> steady_state(const ChannelModel& model);

} // namespace aocsi
