#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "smann/errors.hpp"
#include "smann/montecarlo.hpp"

#include <boost/math/distributions/binomial.hpp>

#include <cmath>

using namespace smann;

namespace {

const double x_star_iq = 0.682327803828019327;

ExperimentPlan iq_plan(std::size_t replicas, std::size_t horizon)
{
    ExperimentPlan plan;
    plan.scheme.kind = SchemeKind::stochastic_mann;
    plan.scheme.map = MapSpec::inverse_quadratic();
    plan.scheme.x0 = Vector{0.5};
    plan.scheme.steps.a = 0.5;
    plan.scheme.noise = NoiseModel::gaussian(1.0, 1);
    plan.scheme.horizon = horizon;
    plan.replicas = replicas;
    plan.base_seed = 7;
    return plan;
}

BoundParams iq_params()
{
    BoundParams p;
    p.N = std::abs(0.5 - x_star_iq);
    p.a = 0.5;
    p.c = 9.0 / (8.0 * std::sqrt(3.0));
    p.sigma = 2.0;
    p.L = 2.0;
    p.mean_norm_bound = std::sqrt(2.0 / 3.141592653589793);
    p.rho = p.contraction_gap();
    return p;
}

}  // namespace

TEST_CASE("replica seeds are distinct")
{
    std::set<std::uint64_t> seen;
    for (std::size_t r = 0; r < 10000; ++r) seen.insert(replica_seed(99, r));
    CHECK(seen.size() == 10000);
}

TEST_CASE("clopper_pearson matches the binomial tail inversion")
{
    using boost::math::binomial_distribution;
    for (auto [k, n] : {std::pair<std::size_t, std::size_t>{0, 10}, {3, 10}, {10, 10}, {17, 1000}, {500, 1000}}) {
        const auto ci = clopper_pearson(k, n, 0.99);
        CHECK(ci.low <= static_cast<double>(k) / n);
        CHECK(ci.high >= static_cast<double>(k) / n);
        // At the limits the corresponding one-sided tail equals 0.005.
        if (k > 0) CHECK(cdf(complement(binomial_distribution<>(n, ci.low), k - 1)) == doctest::Approx(0.005).epsilon(1e-8));
        if (k < n) CHECK(cdf(binomial_distribution<>(n, ci.high), k) == doctest::Approx(0.005).epsilon(1e-8));
    }
    CHECK(clopper_pearson(0, 10).low == 0.0);
    CHECK(clopper_pearson(10, 10).high == 1.0);
    CHECK_THROWS_AS(clopper_pearson(3, 2), InvalidInput);
}

TEST_CASE("empirical_tail: degenerate cells")
{
    SUBCASE("zero noise, eps above the deterministic error")
    {
        auto plan = iq_plan(50, 1000);
        plan.scheme.noise = NoiseModel::zero();
        plan.checkpoints = {100, 1000};
        plan.eps_grid = {0.1};
        auto params = iq_params();
        params.sigma = 0.0;
        params.mean_norm_bound = 0.0;
        const auto result = empirical_tail(plan, Vector{x_star_iq}, params);
        for (const auto& c : result.cells) {
            CHECK(c.p_hat == 0.0);
            CHECK(c.ci_low == 0.0);
        }
        CHECK(result.passed());
    }
    SUBCASE("tiny eps at small n")
    {
        auto plan = iq_plan(200, 10);
        plan.checkpoints = {1, 5, 10};
        plan.eps_grid = {1e-12};
        const auto result = empirical_tail(plan, Vector{x_star_iq}, iq_params());
        for (const auto& c : result.cells) {
            CHECK(c.p_hat == 1.0);
            CHECK(c.ci_low <= c.p_hat);
            CHECK(c.p_hat <= c.ci_high);
        }
    }
}

TEST_CASE("empirical_tail: n = 10^3, eps = 0.1 is dominated by the bound")
{
    auto plan = iq_plan(2000, 1000);
    plan.checkpoints = {1000};
    plan.eps_grid = {0.1};
    const auto result = empirical_tail(plan, Vector{x_star_iq}, iq_params());
    REQUIRE(result.cells.size() == 1);
    CHECK(result.cells[0].ci_high <= result.cells[0].bound_clipped);
    CHECK(result.diverged == 0);
    CHECK(result.passed());
}

TEST_CASE("experiment output is reproducible")
{
    auto plan = iq_plan(64, 300);
    plan.checkpoints = {10, 100, 300};
    plan.eps_grid = {0.01, 0.1};
    const auto a = collect_errors(plan, Vector{x_star_iq});
    const auto b = collect_errors(plan, Vector{x_star_iq});
    CHECK(a.errors == b.errors);
    plan.base_seed = 8;
    CHECK_FALSE(collect_errors(plan, Vector{x_star_iq}).errors == a.errors);
}

TEST_CASE("median error decreases across decades")
{
    auto plan = iq_plan(200, 100000);
    plan.checkpoints = {10, 100, 1000, 10000, 100000};
    const auto errors = collect_errors(plan, Vector{x_star_iq});
    for (std::size_t k = 1; k < plan.checkpoints.size(); ++k) CHECK(errors.median(k) <= errors.median(k - 1));
}

TEST_CASE("plan validation")
{
    auto plan = iq_plan(10, 100);
    plan.checkpoints = {10, 200};
    CHECK_THROWS_AS(plan.validate(), InvalidInput);
    plan.checkpoints = {20, 10};
    CHECK_THROWS_AS(plan.validate(), InvalidInput);
    plan.checkpoints = {10};
    plan.replicas = 0;
    CHECK_THROWS_AS(plan.validate(), InvalidInput);
}

TEST_CASE("coverage_experiment")
{
    // Constant map F = b: x* = b, c = 0, small noise, small K1.
    ExperimentPlan plan;
    plan.scheme.kind = SchemeKind::stochastic_mann;
    plan.scheme.map = MapSpec::affine({{0.0}}, {0.3});
    plan.scheme.x0 = Vector{0.35};
    plan.scheme.steps.a = 0.9;
    plan.scheme.horizon = 10000;
    plan.replicas = 500;
    plan.base_seed = 3;
    const Vector x_star{0.3};

    SUBCASE("zero noise covers always")
    {
        plan.scheme.noise = NoiseModel::zero();
        BoundParams p{0.05, 0.9, 0.0, 0.0, 1.0, 0.0, 0.9};
        const auto r = coverage_experiment(plan, x_star, 0.1, 0.05, p);
        CHECK(r.coverage == 1.0);
        CHECK(r.passed());
    }
    SUBCASE("alpha = 0.5 with generous eps")
    {
        plan.scheme.noise = NoiseModel::bounded_uniform(0.05, 1);
        const auto cramer = plan.scheme.noise->cramer();
        BoundParams p{0.05, 0.9, 0.0, cramer.sigma, cramer.L, cramer.mean_norm_bound, 0.9};
        const auto r = coverage_experiment(plan, x_star, 0.5, 0.5, p);
        CHECK(r.coverage >= 0.5);
        CHECK(r.passed());
    }
    SUBCASE("infeasible when n_alpha exceeds the horizon")
    {
        plan.scheme.noise = NoiseModel::gaussian(1.0, 1);
        BoundParams p{0.05, 0.9, 0.0, 2.0, 2.0, 0.8, 0.9};
        plan.scheme.horizon = 10;
        CHECK_THROWS_AS(coverage_experiment(plan, x_star, 0.01, 0.01, p), InfeasibleError);
    }
}

TEST_CASE("error_table")
{
    SUBCASE("zero noise Picard")
    {
        SchemeConfig cfg;
        cfg.kind = SchemeKind::picard;
        cfg.horizon = 300;
        const auto rows = error_table(cfg, {10, 100, 201}, Vector{x_star_iq});
        REQUIRE(rows.size() == 3);
        CHECK(rows.back().absolute_error <= 1e-12);
        CHECK(rows[0].relative_error == doctest::Approx(rows[0].absolute_error / x_star_iq).epsilon(1e-15));
    }
    SUBCASE("single seed decreases across decades")
    {
        auto plan = iq_plan(1, 1000000);
        plan.scheme.seed = 11;
        const auto rows = error_table(plan.scheme, {10, 100, 1000, 10000, 100000, 1000000}, Vector{x_star_iq});
        for (std::size_t k = 2; k < rows.size(); ++k) CHECK(rows[k].absolute_error < rows[k - 1].absolute_error);
    }
}

TEST_CASE("rate_diagnostic")
{
    auto params = iq_params();
    params.rho = 0.5 * params.contraction_gap();
    SUBCASE("zero noise: supremum at the smallest checkpoint")
    {
        auto plan = iq_plan(5, 10000);
        plan.scheme.noise = NoiseModel::zero();
        plan.checkpoints = {10, 100, 1000, 10000};
        const auto d = rate_diagnostic(plan, Vector{x_star_iq}, params, 1.0);
        CHECK(std::isfinite(d.sup_ratio));
        CHECK(d.argmax_n == 10);
    }
    SUBCASE("argument checks")
    {
        auto plan = iq_plan(5, 100);
        plan.checkpoints = {10, 100};
        CHECK_THROWS_AS(rate_diagnostic(plan, Vector{x_star_iq}, params, 1.0), InvalidInput);
        plan.checkpoints = {1, 10, 100};
        CHECK_THROWS_AS(rate_diagnostic(plan, Vector{x_star_iq}, params, 1.0), InvalidInput);
    }
    SUBCASE("canonical eps0 exceedances shrink along checkpoints")
    {
        auto plan = iq_plan(200, 10000);
        plan.checkpoints = {10, 100, 1000, 10000};
        const TailBound tb(params);
        const double eps0 = canonical_eps0(1.0, tb.constants().K2);
        const auto d = rate_diagnostic(plan, Vector{x_star_iq}, params, eps0);
        double total = 0.0;
        for (double f : d.exceed_fraction) total += f;
        CHECK(total <= 0.05);
    }
}
