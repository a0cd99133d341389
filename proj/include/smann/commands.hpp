#pragma once

#include "smann/config.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace smann::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_validation = 2,
    exit_check_failed = 3,
    exit_infeasible = 4,
};

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
};

RunConfig apply_overrides(RunConfig cfg, const Overrides& overrides);

/// "<command>_seed<base_seed>_<hash>" where the hash ignores output_dir.
std::string output_stem(const RunConfig& cfg, const std::string& command);

/// Trajectory CSV (n, x_n, noise_norm, error_to_ref) plus a JSON summary.
int cmd_iterate(const RunConfig& cfg, std::ostream& out);
/// Prints the tail-bound report for (n, eps) as JSON.
int cmd_bound(const RunConfig& cfg, std::size_t n, double eps, std::ostream& out);
/// n_alpha for (eps, alpha), then the eps-ball around x_{n_alpha+1}.
int cmd_confidence(const RunConfig& cfg, double eps, double alpha, std::ostream& out);
/// Tail grid CSV with a dominance verdict.
int cmd_montecarlo(const RunConfig& cfg, std::ostream& out);
int cmd_cramer_check(const RunConfig& cfg, int m_max, std::size_t draws, std::ostream& out);

/// Parses argv, dispatches, and maps exceptions to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace smann::cli
