#include "smann/montecarlo.hpp"

#include "smann/errors.hpp"
#include "smann/rng.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

namespace smann {

void ExperimentPlan::validate() const
{
    scheme.validate();
    if (replicas < 1) throw InvalidInput("experiment.replicas: must be >= 1");
    if (checkpoints.empty()) throw InvalidInput("experiment.checkpoints: must be non-empty");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        std::adjacent_find(checkpoints.begin(), checkpoints.end()) != checkpoints.end())
        throw InvalidInput("experiment.checkpoints: must be strictly increasing");
    if (checkpoints.front() < 1) throw InvalidInput("experiment.checkpoints: must be >= 1");
    if (checkpoints.back() > scheme.horizon)
        throw InvalidInput("experiment.checkpoints: " + std::to_string(checkpoints.back()) +
                           " exceeds scheme.horizon " + std::to_string(scheme.horizon));
    for (double e : eps_grid)
        if (!(e > 0.0)) throw InvalidInput("experiment.eps_grid: entries must be > 0");
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::size_t replica) noexcept
{
    return rng::derive_seed(base_seed, replica);
}

ConfidenceLimits clopper_pearson(std::size_t successes, std::size_t trials, double confidence)
{
    if (trials == 0 || successes > trials) throw InvalidInput("clopper_pearson: need 0 <= successes <= trials, trials > 0");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidInput("clopper_pearson: confidence must lie in (0, 1)");
    const double tail = (1.0 - confidence) / 2.0;
    const auto k = static_cast<double>(successes);
    const auto n = static_cast<double>(trials);
    ConfidenceLimits out;
    out.low = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, tail);
    out.high = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - tail);
    return out;
}

namespace {

// Calls body(r) for r in [0, count), spread over the available cores.
template <typename Body>
void for_each_replica(std::size_t count, Body&& body)
{
    const std::size_t workers = std::min<std::size_t>(count, std::max(1U, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t r = 0; r < count; ++r) body(r);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t r = next++; r < count; r = next++) body(r);
        });
    }
}

double binomial_se(double p, std::size_t trials) { return std::sqrt(p * (1.0 - p) / static_cast<double>(trials)); }

}  // namespace

double ReplicaErrors::median(std::size_t k) const
{
    std::vector<double> column;
    column.reserve(errors.size());
    for (const auto& row : errors)
        if (!row.empty()) column.push_back(row[k]);
    if (column.empty()) return std::nan("");
    const auto mid = column.begin() + static_cast<std::ptrdiff_t>(column.size() / 2);
    std::nth_element(column.begin(), mid, column.end());
    if (column.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(column.begin(), mid));
}

ReplicaErrors collect_errors(const ExperimentPlan& plan, const Vector& x_star)
{
    plan.validate();
    if (x_star.dim() != plan.scheme.map.dim()) throw InvalidInput("x_star dimension does not match the map");

    ReplicaErrors out;
    out.checkpoints = plan.checkpoints;
    out.errors.assign(plan.replicas, {});
    const auto star = x_star.coords();
    for_each_replica(plan.replicas, [&](std::size_t r) {
        SchemeConfig cfg = plan.scheme;
        cfg.seed = replica_seed(plan.base_seed, r);
        std::vector<double> row;
        row.reserve(plan.checkpoints.size());
        try {
            SchemeRunner runner(cfg);
            for (std::size_t n : plan.checkpoints) {
                runner.advance_to(n + 1);
                row.push_back(distance(runner.state(), star, cfg.norm));
            }
        } catch (const DivergedError&) {
            row.clear();
        }
        out.errors[r] = std::move(row);
    });
    for (const auto& row : out.errors)
        if (row.empty()) ++out.diverged;
    return out;
}

bool TailExperiment::passed() const noexcept
{
    if (diverged != 0) return false;
    return std::all_of(cells.begin(), cells.end(), [](const TailEstimate& c) { return c.dominated(); });
}

TailExperiment tail_from_errors(const ReplicaErrors& errors, const std::vector<double>& eps_grid,
                                const TailBound& bound)
{
    TailExperiment out;
    out.diverged = errors.diverged;
    const std::size_t trials = errors.errors.size() - errors.diverged;
    for (std::size_t k = 0; k < errors.checkpoints.size(); ++k) {
        out.median_error.push_back(errors.median(k));
        for (double eps : eps_grid) {
            TailEstimate cell;
            cell.n = errors.checkpoints[k];
            cell.eps = eps;
            cell.trials = trials;
            for (const auto& row : errors.errors)
                if (!row.empty() && row[k] > eps) ++cell.exceed;
            if (trials > 0) {
                cell.p_hat = static_cast<double>(cell.exceed) / static_cast<double>(trials);
                const auto ci = clopper_pearson(cell.exceed, trials);
                cell.ci_low = ci.low;
                cell.ci_high = ci.high;
            }
            cell.bound_clipped = bound.report(cell.n, eps).clipped_bound;
            out.cells.push_back(cell);
        }
    }
    return out;
}

TailExperiment empirical_tail(const ExperimentPlan& plan, const Vector& x_star, const BoundParams& params)
{
    const TailBound bound(params);
    return tail_from_errors(collect_errors(plan, x_star), plan.eps_grid, bound);
}

CoverageResult coverage_experiment(const ExperimentPlan& plan, const Vector& x_star, double eps, double alpha,
                                   const BoundParams& params, std::uint64_t n_cap)
{
    const TailBound bound(params);
    const auto n_alpha = min_iterations_for_confidence(eps, alpha, bound, n_cap);
    if (!n_alpha) {
        const double log_cap = bound.log_raw(static_cast<double>(n_cap), eps);
        throw InfeasibleError("coverage: no n <= " + std::to_string(n_cap) + " brings the tail bound below alpha",
                              log_cap, std::exp(log_cap));
    }
    if (*n_alpha > plan.scheme.horizon) {
        const double log_h = bound.log_raw(static_cast<double>(plan.scheme.horizon), eps);
        throw InfeasibleError("coverage: n_alpha = " + std::to_string(*n_alpha) + " exceeds the horizon " +
                                  std::to_string(plan.scheme.horizon),
                              log_h, std::exp(log_h));
    }

    ExperimentPlan run_plan = plan;
    run_plan.checkpoints = {static_cast<std::size_t>(*n_alpha)};
    const auto errors = collect_errors(run_plan, x_star);

    CoverageResult out;
    out.n_alpha = *n_alpha;
    out.diverged = errors.diverged;
    out.trials = errors.errors.size() - errors.diverged;
    for (const auto& row : errors.errors)
        if (!row.empty() && row[0] <= eps) ++out.covered;
    out.coverage = out.trials ? static_cast<double>(out.covered) / static_cast<double>(out.trials) : 0.0;
    out.threshold = 1.0 - alpha - 3.0 * binomial_se(alpha, std::max<std::size_t>(out.trials, 1));
    return out;
}

std::vector<ErrorRow> error_table(const SchemeConfig& scheme, const std::vector<std::size_t>& checkpoints,
                                  const Vector& x_star)
{
    if (x_star.dim() != scheme.map.dim()) throw InvalidInput("error_table: x_star dimension mismatch");
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()))
        throw InvalidInput("error_table: checkpoints must be sorted");
    if (!checkpoints.empty() && checkpoints.front() < 1) throw InvalidInput("error_table: checkpoints must be >= 1");
    const double scale = norm(x_star, scheme.norm);

    SchemeRunner runner(scheme);
    std::vector<ErrorRow> rows;
    for (std::size_t n : checkpoints) {
        runner.advance_to(n);
        const auto s = runner.state();
        ErrorRow row;
        row.n = n;
        row.x_n = Vector(std::vector<double>(s.begin(), s.end()));
        row.absolute_error = distance(s, x_star.coords(), scheme.norm);
        row.relative_error = scale > 0.0 ? row.absolute_error / scale : std::nan("");
        rows.push_back(std::move(row));
    }
    return rows;
}

RateDiagnostic rate_diagnostic(const ExperimentPlan& plan, const Vector& x_star, const BoundParams& params,
                               double eps0)
{
    if (plan.checkpoints.size() < 3) throw InvalidInput("rate_diagnostic: need at least 3 checkpoints");
    if (plan.checkpoints.front() < 2) throw InvalidInput("rate_diagnostic: checkpoints must be >= 2");
    if (!(eps0 >= 0.0)) throw InvalidInput("rate_diagnostic: eps0 must be >= 0");

    std::vector<double> envelope;
    for (std::size_t n : plan.checkpoints) envelope.push_back(rate_envelope(static_cast<double>(n), 1.0, params));

    const auto errors = collect_errors(plan, x_star);
    RateDiagnostic out;
    out.diverged = errors.diverged;
    out.exceed_fraction.assign(plan.checkpoints.size(), 0.0);
    const std::size_t trials = errors.errors.size() - errors.diverged;
    for (const auto& row : errors.errors) {
        if (row.empty()) continue;
        for (std::size_t k = 0; k < row.size(); ++k) {
            const double ratio = row[k] / envelope[k];
            if (ratio > out.sup_ratio) {
                out.sup_ratio = ratio;
                out.argmax_n = plan.checkpoints[k];
            }
            if (row[k] > eps0 * envelope[k]) out.exceed_fraction[k] += 1.0;
        }
    }
    if (trials > 0)
        for (double& f : out.exceed_fraction) f /= static_cast<double>(trials);
    return out;
}

}  // namespace smann
