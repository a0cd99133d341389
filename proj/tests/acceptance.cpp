// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include "smann/bounds.hpp"
#include "smann/commands.hpp"
#include "smann/config.hpp"
#include "smann/errors.hpp"
#include "smann/montecarlo.hpp"
#include "smann/rng.hpp"
#include "smann/schemes.hpp"
#include "smann/spaces.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace smann;
namespace fs = std::filesystem;

namespace {

const fs::path config_dir = SMANN_CONFIG_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > limit_seconds) {
        o.pass = false;
        o.detail += "; over time limit";
    }
    if (!o.pass) ++failures;
    std::printf("[%s] C%d %s: %s (%.2f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", id, title.c_str(),
                o.detail.c_str(), secs, limit_seconds);
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

RunConfig baseline_config() { return load_config(config_dir / "inverse_quadratic.json"); }

Vector x_star_iq() { return reference_fixed_point(MapSpec::inverse_quadratic(), 1e-14); }

Outcome c1()
{
    const double x = reference_fixed_point(MapSpec::inverse_quadratic(), 1e-14)[0];
    const double err = std::abs(x - 0.682327803828019);
    return {err <= 1e-12, fmt("x* = %.17g, |x* - 0.682327803828019| = %.3g", x, err)};
}

Outcome c2()
{
    const auto map = MapSpec::inverse_quadratic();
    const auto box = default_domain_box(map);
    const double c_hat = estimate_contraction(map, box, 100000, 1, NormKind::euclidean);
    const double c_true = 9.0 / (8.0 * std::sqrt(3.0));
    const bool ok = c_hat > 0.60 && c_hat <= 0.6496 && c_hat <= c_true + 1e-9;
    return {ok, fmt("estimate %.10f, analytic %.10f", c_hat, c_true)};
}

Outcome c3()
{
    const rng::CounterStream s{3};
    std::size_t violations = 0;
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 10000; ++k) {
        const auto n = 1 + static_cast<std::size_t>(s.bits(k, 0) % 10000);
        const auto i = 1 + static_cast<std::size_t>(s.bits(k, 1) % n);
        const double a = s.uniform(k, 2);
        const double c = s.uniform(k, 3);
        const auto pb = product_bound(i, n, a, c);
        worst = std::max(worst, pb.lhs / pb.rhs);
        if (pb.lhs > pb.rhs * (1.0 + 1e-14)) ++violations;
    }
    return {violations == 0, fmt("%zu violations in 10^4 trials, max lhs/rhs = %.15f", violations, worst)};
}

Outcome c4()
{
    const auto x_star = x_star_iq();
    SchemeConfig cfg;
    cfg.kind = SchemeKind::stochastic_mann;
    cfg.map = MapSpec::inverse_quadratic();
    cfg.x0 = Vector{0.5};
    cfg.steps.a = 0.5;
    cfg.noise = NoiseModel::gaussian(1.0, 1);
    cfg.horizon = 1000;

    BoundParams p;
    p.N = distance(cfg.x0.coords(), x_star.coords(), NormKind::euclidean);
    p.a = 0.5;
    p.c = contraction_constant(cfg.map, NormKind::euclidean);
    p.rho = p.contraction_gap();

    std::size_t violations = 0;
    double worst_margin = -1e300;
    for (std::size_t r = 0; r < 1000; ++r) {
        cfg.seed = replica_seed(404, r);
        SchemeRunner runner(cfg);
        double envelope = p.N;
        for (std::size_t n = 1; n <= cfg.horizon; ++n) {
            runner.advance();
            const double f = 1.0 - p.contraction_gap() / static_cast<double>(n);
            envelope = f * envelope + p.a / (static_cast<double>(n) * n) * runner.last_noise_norm();
            const double err = distance(runner.state(), x_star.coords(), NormKind::euclidean);
            worst_margin = std::max(worst_margin, err - envelope);
            if (err > envelope + static_cast<double>(n) * 1e-12) ++violations;
        }
    }
    return {violations == 0, fmt("%zu violations over 10^3 trajectories x 10^3 steps, max(error - envelope) = %.3g",
                                 violations, worst_margin)};
}

// Explicit sum of the first M terms for many exponent pairs in one pass
// (shared logarithms), plus a tail integral by exp-sinh quadrature over
// [M + 1/2, inf). For convex decreasing f the midpoint error per unit is below
// f''/24, which for M = 10^7 is under 1e-20 in total.
std::vector<double> brute_force_series(const std::vector<std::array<double, 2>>& pq, std::size_t M)
{
    std::vector<long double> sums(pq.size(), 0.0L);
    for (std::size_t i = M; i >= 1; --i) {
        const long double li = std::log(static_cast<long double>(i));
        const long double lj = std::log1p(static_cast<long double>(i));
        for (std::size_t k = 0; k < pq.size(); ++k) sums[k] += std::exp(pq[k][0] * lj - pq[k][1] * li);
    }
    std::vector<double> out(pq.size());
    boost::math::quadrature::exp_sinh<double> integrator;
    const double start = static_cast<double>(M) + 0.5;
    for (std::size_t k = 0; k < pq.size(); ++k) {
        const double p = pq[k][0], q = pq[k][1];
        const double tail = integrator.integrate(
            [&](double t) { return std::pow(start + t + 1.0, p) / std::pow(start + t, q); }, 0.0,
            std::numeric_limits<double>::infinity());
        out[k] = static_cast<double>(sums[k] + tail);
    }
    return out;
}

Outcome c5()
{
    const double sigma = 1.0;
    std::vector<std::array<double, 2>> pq;
    std::vector<std::array<double, 2>> ac;
    for (double a : {0.1, 0.5, 0.9}) {
        for (double c : {0.0, 0.5, 0.65, 0.9}) {
            ac.push_back({a, c});
            pq.push_back({a * (1.0 - c), 2.0});
            pq.push_back({2.0 * a * (1.0 - c), 4.0});
        }
    }
    const auto brute = brute_force_series(pq, 10'000'000);
    double worst = 0.0;
    for (std::size_t k = 0; k < ac.size(); ++k) {
        const auto [a, c] = ac[k];
        const double s1 = series_S1(a, c, 1e-10).value;
        const double s2 = series_S2(a, c, sigma, 1e-10).value;
        worst = std::max(worst, std::abs(s1 - brute[2 * k]));
        worst = std::max(worst, std::abs(s2 - 4.0 * a * a * sigma * sigma * brute[2 * k + 1]));
    }
    return {worst <= 2e-10, fmt("max |difference| over 12 (a, c) pairs = %.3g", worst)};
}

BoundParams baseline_params(const RunConfig& cfg, const Vector& x_star)
{
    auto p = cfg.bound_params(x_star);
    p.rho = 0.5 * 2.0 * p.a * (1.0 - p.c);
    return p;
}

Outcome c6()
{
    const auto cfg = baseline_config();
    const auto x_star = x_star_iq();
    auto plan = cfg.plan();
    plan.checkpoints = {100, 1000, 10000};
    plan.eps_grid = {0.05, 0.1, 0.2};
    plan.replicas = 10000;
    plan.scheme.horizon = 10000;
    const auto result = empirical_tail(plan, x_star, baseline_params(cfg, x_star));
    std::size_t dominated = 0, vacuous = 0;
    std::ostringstream cells;
    for (const auto& c : result.cells) {
        dominated += c.dominated();
        vacuous += c.vacuous();
        cells << fmt(" (n=%zu, eps=%g: p_hat=%.4f, ci_low=%.4f, bound=%.3g%s)", c.n, c.eps, c.p_hat, c.ci_low,
                     c.bound_clipped, c.vacuous() ? " vacuous" : "");
    }
    return {result.passed(), fmt("%zu/9 cells dominated, %zu vacuous, %zu diverged;", dominated, vacuous,
                                 result.diverged) + cells.str()};
}

Outcome c7()
{
    const auto cfg = baseline_config();
    const auto x_star = x_star_iq();
    const auto p4 = baseline_params(cfg, x_star);
    const TailBound bound4(p4);
    std::ostringstream detail;
    std::size_t infeasible = 0;
    for (double alpha : {0.05, 0.1}) {
        for (double eps : {0.1, 0.2}) {
            const auto n = min_iterations_for_confidence(eps, alpha, bound4);
            if (!n || *n > 1'000'000) {
                ++infeasible;
                detail << fmt("baseline (alpha=%g, eps=%g): infeasible at desk scale (log bound at 1e12 = %.3g); ",
                              alpha, eps, bound4.log_raw(1e12, eps));
            }
        }
    }

    // Small-K1 set: constant map F = 0.3 (c = 0), a = 0.9, uniform noise of half-width 0.05.
    ExperimentPlan plan;
    plan.scheme.kind = SchemeKind::stochastic_mann;
    plan.scheme.map = MapSpec::affine({{0.0}}, {0.3});
    plan.scheme.x0 = Vector{0.35};
    plan.scheme.steps.a = 0.9;
    plan.scheme.noise = NoiseModel::bounded_uniform(0.05, 1);
    plan.scheme.horizon = 10000;
    plan.replicas = 10000;
    plan.base_seed = cfg.base_seed;
    const Vector x_star_small{0.3};
    const auto cr = plan.scheme.noise->cramer();
    const BoundParams small{0.05, 0.9, 0.0, cr.sigma, cr.L, cr.mean_norm_bound, 0.9};

    bool ok = true;
    for (double alpha : {0.05, 0.1}) {
        for (double eps : {0.1, 0.2}) {
            const auto r = coverage_experiment(plan, x_star_small, eps, alpha, small);
            ok = ok && r.passed() && r.n_alpha <= 10000;
            detail << fmt("small-K1 (alpha=%g, eps=%g): n_alpha=%llu coverage=%.4f >= %.4f; ", alpha, eps,
                          static_cast<unsigned long long>(r.n_alpha), r.coverage, r.threshold);
        }
    }
    detail << fmt("%zu/4 baseline cells infeasible", infeasible);
    return {ok, detail.str()};
}

Outcome c8()
{
    const auto cfg = baseline_config();
    const auto x_star = x_star_iq();
    const std::vector<std::size_t> checkpoints{10, 100, 1000, 10000, 100000, 1000000};
    auto scheme = cfg.scheme_config();
    const auto rows = error_table(scheme, checkpoints, x_star);
    bool monotone = true;
    for (std::size_t k = 2; k < rows.size(); ++k) monotone = monotone && rows[k].absolute_error < rows[k - 1].absolute_error;

    scheme.horizon = 10000;
    std::size_t in_band = 0;
    for (std::size_t r = 0; r < 200; ++r) {
        scheme.seed = replica_seed(cfg.base_seed, r);
        const double e = error_table(scheme, {10000}, x_star).front().absolute_error;
        in_band += (e >= 1e-6 && e <= 1e-2);
    }
    const double anchor_value = 1.441924e-4;  // a published single-seed realization at n = 10^4
    const bool anchor = anchor_value >= 1e-6 && anchor_value <= 1e-2;
    std::ostringstream errs;
    for (const auto& row : rows) errs << fmt(" %zu:%.3g", row.n, row.absolute_error);
    return {monotone && in_band >= 190 && anchor,
            fmt("monotone from 10^2: %s, %zu/200 seeds in [1e-6, 1e-2] at n=10^4, errors:", monotone ? "yes" : "no",
                in_band) + errs.str()};
}

Outcome c9()
{
    const auto cfg = baseline_config();
    const auto x_star = x_star_iq();
    auto params = cfg.bound_params(x_star);
    params.rho = 0.5 * params.a * (1.0 - params.c);

    const auto sup_at = [&](std::size_t horizon) {
        auto plan = cfg.plan();
        plan.replicas = 200;
        plan.scheme.horizon = horizon;
        plan.checkpoints.clear();
        for (double n = 10.0; n <= static_cast<double>(horizon) * (1 + 1e-9); n *= std::sqrt(10.0))
            plan.checkpoints.push_back(static_cast<std::size_t>(std::llround(n)));
        return rate_diagnostic(plan, x_star, params, 1.0);
    };
    const auto d4 = sup_at(10000);
    const auto d5 = sup_at(100000);
    const double ratio = d5.sup_ratio / d4.sup_ratio;
    return {ratio <= 2.0 && ratio >= 0.5 && d4.diverged == 0 && d5.diverged == 0,
            fmt("sup_ratio(10^4) = %.6g at n=%zu, sup_ratio(10^5) = %.6g at n=%zu, ratio %.4f", d4.sup_ratio,
                d4.argmax_n, d5.sup_ratio, d5.argmax_n, ratio)};
}

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    if (!fs::exists(dir)) return files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        std::ifstream in(entry.path(), std::ios::binary);
        files[entry.path().filename().string()] = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return files;
}

Outcome c10()
{
    const auto root = fs::temp_directory_path() / "smann_acceptance_repro";
    fs::remove_all(root);
    const std::string config = (config_dir / "inverse_quadratic.json").string();
    const std::vector<std::vector<std::string>> commands{
        {"iterate"},
        {"bound", "--n", "1000", "--eps", "0.1"},
        {"confidence"},
        {"montecarlo", "--replicas", "500"},
        {"cramer-check", "--draws", "100000"},
    };
    std::size_t identical = 0;
    std::size_t files = 0;
    std::ostringstream detail;
    for (const auto& command : commands) {
        std::array<std::string, 2> outs;
        std::array<int, 2> codes{};
        std::array<std::map<std::string, std::string>, 2> written;
        for (int run = 0; run < 2; ++run) {
            const auto dir = root / (command[0] + std::to_string(run));
            std::vector<std::string> args{"smann"};
            args.insert(args.end(), command.begin(), command.end());
            args.insert(args.end(), {"--config", config, "--out", dir.string()});
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            codes[run] = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            outs[run] = out.str();
            written[run] = read_dir(dir);
        }
        const bool same = codes[0] == codes[1] && outs[0] == outs[1] && written[0] == written[1] && !outs[0].empty();
        identical += same;
        files += written[0].size();
        detail << command[0] << (same ? " identical" : " DIFFERS") << fmt(" (exit %d); ", codes[0]);
    }
    fs::remove_all(root);
    return {identical == commands.size(), detail.str() + fmt("%zu output files compared", files)};
}

}  // namespace

int main()
{
    criterion(1, "fixed-point reference", 1, c1);
    criterion(2, "contraction constant estimate", 5, c2);
    criterion(3, "product inequality", 10, c3);
    criterion(4, "pathwise envelope", 30, c4);
    criterion(5, "series oracle equivalence", 60, c5);
    criterion(6, "tail-bound dominance", 300, c6);
    criterion(7, "confidence coverage", 600, c7);
    criterion(8, "error table shape", 300, c8);
    criterion(9, "rate diagnostic stability", 300, c9);
    criterion(10, "reproducibility", 600, c10);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
