#pragma once

#include "smann/bounds.hpp"
#include "smann/schemes.hpp"
#include "smann/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace smann {

/// A replicated run of one scheme. Replica r uses seed derive_seed(base_seed, r);
/// scheme.seed is ignored.
struct ExperimentPlan {
    SchemeConfig scheme;
    std::vector<std::size_t> checkpoints;  ///< sorted, each <= scheme.horizon
    std::vector<double> eps_grid;
    std::size_t replicas = 1;
    std::uint64_t base_seed = 0;

    void validate() const;
};

std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica) noexcept;

struct ConfidenceLimits {
    double low = 0.0;
    double high = 1.0;
};

/// Exact (Clopper-Pearson) two-sided limits for a binomial proportion.
ConfidenceLimits clopper_pearson(std::size_t successes, std::size_t trials, double confidence = 0.99);

/// ||x_{n+1} - x*|| for every replica and checkpoint n (after n steps).
struct ReplicaErrors {
    std::vector<std::size_t> checkpoints;
    /// errors[r][k] for replica r at checkpoints[k]; empty row if replica r diverged.
    std::vector<std::vector<double>> errors;
    std::size_t diverged = 0;

    /// Median over non-diverged replicas at checkpoint index k.
    double median(std::size_t k) const;
};

/// Runs every replica up to the largest checkpoint. Replicas may run on
/// several threads; the result does not depend on scheduling.
ReplicaErrors collect_errors(const ExperimentPlan& plan, const Vector& x_star);

struct TailEstimate {
    std::size_t n = 0;
    double eps = 0.0;
    std::size_t exceed = 0;
    std::size_t trials = 0;
    double p_hat = 0.0;
    double ci_low = 0.0;   ///< 99% exact lower limit
    double ci_high = 1.0;  ///< 99% exact upper limit
    double bound_clipped = 1.0;

    bool dominated() const noexcept { return ci_low <= bound_clipped; }
    bool vacuous() const noexcept { return bound_clipped >= 1.0; }
};

struct TailExperiment {
    std::vector<TailEstimate> cells;  ///< checkpoint-major, eps-minor
    std::vector<double> median_error;  ///< per checkpoint
    std::size_t diverged = 0;

    /// Every cell dominated and no replica diverged.
    bool passed() const noexcept;
};

/// p_hat = fraction of replicas with ||x_{n+1} - x*|| > eps, with exact 99%
/// limits and the clipped theoretical bound attached.
TailExperiment empirical_tail(const ExperimentPlan& plan, const Vector& x_star, const BoundParams& params);
TailExperiment tail_from_errors(const ReplicaErrors& errors, const std::vector<double>& eps_grid,
                                const TailBound& bound);

struct CoverageResult {
    std::uint64_t n_alpha = 0;
    std::size_t covered = 0;
    std::size_t trials = 0;
    double coverage = 0.0;
    double threshold = 0.0;  ///< 1 - alpha - 3 sqrt(alpha(1-alpha)/trials)
    std::size_t diverged = 0;

    bool passed() const noexcept { return diverged == 0 && coverage >= threshold; }
};

/// Runs the replicas to x_{n_alpha+1} and measures how often the eps-ball
/// around it contains x*. Throws InfeasibleError when n_alpha is not found
/// under `n_cap` or exceeds plan.scheme.horizon.
CoverageResult coverage_experiment(const ExperimentPlan& plan, const Vector& x_star, double eps, double alpha,
                                   const BoundParams& params, std::uint64_t n_cap = default_search_cap);

struct ErrorRow {
    std::size_t n = 0;
    Vector x_n;
    double absolute_error = 0.0;
    double relative_error = 0.0;
};

/// One trajectory of `scheme`, reported at x_n for each checkpoint n
/// (x_1 = x0); relative error is absolute error over ||x*||.
std::vector<ErrorRow> error_table(const SchemeConfig& scheme, const std::vector<std::size_t>& checkpoints,
                                  const Vector& x_star);

struct RateDiagnostic {
    double sup_ratio = 0.0;
    std::size_t argmax_n = 0;
    /// Per checkpoint: fraction of replicas with ||x_{n+1} - x*|| > eps0 * r_n.
    std::vector<double> exceed_fraction;
    std::size_t diverged = 0;
};

/// sup over replicas and checkpoints of ||x_{n+1} - x*|| / rate_envelope(n, 1, params).
RateDiagnostic rate_diagnostic(const ExperimentPlan& plan, const Vector& x_star, const BoundParams& params,
                               double eps0);

}  // namespace smann
