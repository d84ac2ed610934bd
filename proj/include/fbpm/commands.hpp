#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "fbpm/config.hpp"
#include "fbpm/diagnostics.hpp"
#include "fbpm/viscosity.hpp"

namespace fbpm {

/// Output files by relative path. std::map keeps emission order fixed.
using Artifacts = std::map<std::string, std::string>;

inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitUsage = 2;

/// Every key any subcommand understands.
const std::set<std::string>& known_config_keys();

/// Initial data, grid and flux model from the problem.* and exponent.* keys.
struct Problem {
    Grid grid;
    ScalarField f;
    FluxModel model;
};

Problem build_problem(const Config& cfg);

/// rothe.* keys for a given epsilon. rothe.m = auto resolves to
/// min_steps(K, T, eps, gamma); gamma defaults to eps / 2.
struct RotheSetup {
    RotheConfig config;
    bool m_auto = false;
    std::size_t m0 = 0;
};

RotheSetup build_rothe(const Config& cfg, double epsilon, double K);

struct CommandResult {
    int exit_code = kExitOk;
    Artifacts files;
    /// Human-readable lines for stdout.
    std::vector<std::string> messages;
};

/// Final state, energy trace and summary for one finished (or failed) run,
/// with every path prefixed by `prefix`.
Artifacts run_artifacts(const Trajectory& traj, const RotheSetup& setup, const std::string& error,
                        const std::string& prefix);

/// Throws ConfigError for usage problems; solver failures become exit code 1.
CommandResult cmd_run(const Config& cfg);
CommandResult cmd_sweep(const Config& cfg);

/// Creates `dir` as needed and writes every artifact below it.
void write_artifacts(const std::string& dir, const Artifacts& files);

}  // namespace fbpm
