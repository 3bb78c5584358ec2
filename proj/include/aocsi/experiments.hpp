#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "aocsi/config.hpp"

namespace aocsi {

struct RunOptions {
    /// Policy kind for the `simulate` subcommand.
    PolicyKind sim_policy = PolicyKind::Optimal;
    /// Age bound for `curves`; 0 means use solver delta_max.
    int curves_delta_max = 0;
};

/// Exit codes shared by the library entry point and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNotConverged = 2;
inline constexpr int kExitIoError = 3;

/// Runs one experiment subcommand (validate, curves, solve, policy-map,
/// compare, simulate) and writes its CSV outputs into out_dir. Partial
/// outputs are removed on failure. Returns an exit code.
int run_subcommand(const std::string& name, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, std::ostream& log,
                   const RunOptions& options = {});

} // namespace aocsi
