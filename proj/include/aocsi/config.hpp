#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "aocsi/mdp.hpp"
#include "aocsi/simulate.hpp"

namespace aocsi {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One experiment in one file: channel, reward surface, solver settings,
/// simulation settings. See configs/paper.cfg for the format.
struct ExperimentConfig {
    Matrix transition;
    std::vector<double> reliabilities;
    RewardParams reward{};

    double theta = 1e-9;
    int delta_max = 0;
    AgedObservation ref_state{1, 0};
    long max_iterations = 100000;
    double damping = 0.0;

    long long horizon = 0;
    std::uint64_t seed = 0;
    long long warmup = 0;
    Accounting accounting = Accounting::Expected;

    /// FNV-1a over the canonical serialization; recorded in policy
    /// metadata so a lookup table can be traced back to its config.
    std::uint64_t hash() const;
};

/// Parses and fully validates a config file. Errors carry the offending
/// key path (e.g. channel.transition[0]).
ExperimentConfig load_config(const std::filesystem::path& path);

/// Parses config text; `origin` is used in error messages.
ExperimentConfig parse_config(const std::string& text, const std::string& origin);

} // namespace aocsi
