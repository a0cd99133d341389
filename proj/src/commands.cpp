#include "smann/commands.hpp"

#include "smann/errors.hpp"
#include "smann/output.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <sstream>

namespace smann::cli {

namespace {

using ojson = nlohmann::ordered_json;

std::optional<Vector> try_reference(const RunConfig& cfg)
{
    for (double tol : {1e-14, 1e-12, 1e-10}) {
        try {
            return reference_fixed_point(cfg.map, tol, cfg.norm);
        } catch (const DomainError&) {
        }
    }
    return std::nullopt;
}

Vector require_reference(const RunConfig& cfg)
{
    auto x = try_reference(cfg);
    if (!x) throw DomainError("reference fixed point could not be computed to 1e-10");
    return *x;
}

std::vector<double> to_std(std::span<const double> s) { return {s.begin(), s.end()}; }

ojson header(const RunConfig& cfg, const std::string& command)
{
    ojson j;
    j["command"] = command;
    j["config_hash"] = output_stem(cfg, command).substr(output_stem(cfg, command).rfind('_') + 1);
    j["base_seed"] = cfg.base_seed;
    return j;
}

std::string csv_preamble(const RunConfig& cfg, const std::string& command)
{
    const auto stem = output_stem(cfg, command);
    return "# config_hash=" + stem.substr(stem.rfind('_') + 1) + ",base_seed=" + std::to_string(cfg.base_seed) + "\n";
}

ojson params_json(const BoundParams& p)
{
    ojson j;
    j["N"] = p.N;
    j["a"] = p.a;
    j["c"] = p.c;
    j["sigma"] = p.sigma;
    j["L"] = p.L;
    j["mean_norm_bound"] = p.mean_norm_bound;
    j["rho"] = p.rho;
    return j;
}

std::filesystem::path out_path(const RunConfig& cfg, const std::string& command, const char* ext)
{
    return std::filesystem::path(cfg.output_dir) / (output_stem(cfg, command) + ext);
}

}  // namespace

RunConfig apply_overrides(RunConfig cfg, const Overrides& overrides)
{
    if (overrides.out_dir) cfg.output_dir = *overrides.out_dir;
    if (overrides.seed) cfg.base_seed = *overrides.seed;
    if (overrides.replicas) cfg.experiment.replicas = *overrides.replicas;
    return cfg;
}

std::string output_stem(const RunConfig& cfg, const std::string& command)
{
    RunConfig hashed = cfg;
    hashed.output_dir.clear();
    return command + "_seed" + std::to_string(cfg.base_seed) + "_" + config_hash(hashed);
}

int cmd_iterate(const RunConfig& cfg, std::ostream& out)
{
    const SchemeConfig scheme = cfg.scheme_config();
    const auto x_star = try_reference(cfg);
    const std::size_t last = scheme.horizon + 1;
    for (std::size_t n : cfg.output_checkpoints)
        if (n < 1 || n > last)
            throw InvalidInput("config.scheme.checkpoints: " + std::to_string(n) + " outside [1, horizon + 1]");

    // Pathwise envelope E_{n+1} = (1 - a(1-c)/n) E_n + (a/n^2) ||xi_n||.
    const bool track_envelope = x_star && scheme.kind == SchemeKind::stochastic_mann;
    const double c = contraction_constant(cfg.map, cfg.norm);
    double envelope = x_star ? distance(cfg.x0.coords(), x_star->coords(), cfg.norm) : 0.0;
    std::size_t violations = 0;

    const std::size_t d = cfg.map.dim();
    std::ostringstream csv;
    csv << csv_preamble(cfg, "iterate") << "n";
    for (std::size_t i = 0; i < d; ++i) csv << (d == 1 ? ",x" : ",x" + std::to_string(i + 1));
    csv << ",noise_norm,error_to_ref\n";

    std::size_t next_row = 0;
    const auto wanted = [&](std::size_t n) {
        if (cfg.output_checkpoints.empty()) return true;
        while (next_row < cfg.output_checkpoints.size() && cfg.output_checkpoints[next_row] < n) ++next_row;
        return next_row < cfg.output_checkpoints.size() && cfg.output_checkpoints[next_row] == n;
    };

    SchemeRunner runner(scheme);
    std::vector<double> x_n;
    for (std::size_t n = 1; n <= last; ++n) {
        x_n = to_std(runner.state());
        const double err = x_star ? distance(x_n, x_star->coords(), cfg.norm) : 0.0;
        std::optional<double> noise_norm;
        if (n < last) {
            runner.advance();
            if (scheme.noise) noise_norm = runner.last_noise_norm();
            if (track_envelope) {
                const auto dn = static_cast<double>(n);
                envelope = (1.0 - cfg.a * (1.0 - c) / dn) * envelope + cfg.a / (dn * dn) * *noise_norm;
                const double next_err = distance(runner.state(), x_star->coords(), cfg.norm);
                if (next_err > envelope + dn * 1e-12) ++violations;
            }
        }
        if (!wanted(n)) continue;
        csv << n;
        for (double v : x_n) csv << ',' << format_real(v);
        csv << ',' << (noise_norm ? format_real(*noise_norm) : "");
        csv << ',' << (x_star ? format_real(err) : "") << '\n';
    }

    const auto csv_path = out_path(cfg, "iterate", ".csv");
    write_text_file(csv_path, csv.str());

    ojson summary = header(cfg, "iterate");
    summary["scheme"] = std::string(to_string(scheme.kind));
    summary["horizon"] = scheme.horizon;
    summary["final_n"] = last;
    summary["final_x"] = x_n;
    if (x_star) {
        summary["x_star"] = to_std(x_star->coords());
        summary["final_error"] = distance(x_n, x_star->coords(), cfg.norm);
    }
    if (track_envelope) summary["envelope_violations"] = violations;
    summary["trajectory_csv"] = csv_path.filename().string();
    const auto text = dump_json(summary);
    write_text_file(out_path(cfg, "iterate", ".json"), text);
    out << text;
    return exit_ok;
}

int cmd_bound(const RunConfig& cfg, std::size_t n, double eps, std::ostream& out)
{
    const auto x_star = cfg.bounds.N ? std::optional<Vector>(cfg.x0) : std::optional<Vector>(require_reference(cfg));
    const BoundParams params = cfg.bound_params(*x_star);
    const auto report = TailBound(params).report(n, eps);

    ojson j = header(cfg, "bound");
    j["n"] = n;
    j["eps"] = eps;
    j["params"] = params_json(params);
    j["S1"] = report.S1;
    j["S2"] = report.S2;
    j["K1"] = report.K1;
    j["log_K1"] = report.log_K1;
    j["K2"] = report.K2;
    j["exponent"] = report.exponent;
    j["rate_exponent"] = params.rate_exponent();
    j["raw_bound"] = report.raw_bound;
    j["log_raw_bound"] = report.log_raw_bound;
    j["clipped_bound"] = report.clipped_bound;
    out << dump_json(j);
    return exit_ok;
}

int cmd_confidence(const RunConfig& cfg, double eps, double alpha, std::ostream& out)
{
    const auto x_star = try_reference(cfg);
    if (!x_star && !cfg.bounds.N) throw InvalidInput("config.bounds.N: required when no reference fixed point exists");
    const BoundParams params = cfg.bound_params(x_star ? *x_star : cfg.x0);
    const TailBound bound(params);
    const auto n_alpha = min_iterations_for_confidence(eps, alpha, bound);

    ojson j = header(cfg, "confidence");
    j["eps"] = eps;
    j["alpha"] = alpha;
    j["params"] = params_json(params);
    j["K1"] = bound.constants().K1;
    j["log_K1"] = bound.constants().log_K1;
    j["K2"] = bound.constants().K2;

    int code = exit_ok;
    if (!n_alpha) {
        j["status"] = "infeasible";
        j["n_cap"] = default_search_cap;
        j["log_raw_bound_at_cap"] = bound.log_raw(static_cast<double>(default_search_cap), eps);
        code = exit_infeasible;
    } else if (*n_alpha > cfg.horizon) {
        j["status"] = "infeasible";
        j["n_alpha"] = *n_alpha;
        j["reason"] = "n_alpha exceeds scheme.horizon";
        code = exit_infeasible;
    } else {
        SchemeRunner runner(cfg.scheme_config());
        runner.advance_to(static_cast<std::size_t>(*n_alpha) + 1);
        const auto center = to_std(runner.state());
        j["status"] = "ok";
        j["n_alpha"] = *n_alpha;
        j["center"] = center;
        j["radius"] = eps;
        if (center.size() == 1) j["interval"] = std::vector<double>{center[0] - eps, center[0] + eps};
        if (x_star) j["contains_x_star"] = distance(center, x_star->coords(), cfg.norm) <= eps;
    }
    const auto text = dump_json(j);
    write_text_file(out_path(cfg, "confidence", ".json"), text);
    out << text;
    return code;
}

int cmd_montecarlo(const RunConfig& cfg, std::ostream& out)
{
    const ExperimentPlan plan = cfg.plan();
    if (plan.eps_grid.empty()) throw InvalidInput("config.experiment.eps_grid: must be non-empty");
    const Vector x_star = require_reference(cfg);
    const BoundParams params = cfg.bound_params(x_star);
    const TailBound bound(params);
    const auto result = tail_from_errors(collect_errors(plan, x_star), plan.eps_grid, bound);

    std::ostringstream csv;
    csv << csv_preamble(cfg, "montecarlo")
        << "n,eps,exceed,trials,p_hat,ci_low,ci_high,bound_clipped,dominated,vacuous\n";
    std::size_t failing = 0, vacuous = 0;
    for (const auto& c : result.cells) {
        csv << c.n << ',' << format_real(c.eps) << ',' << c.exceed << ',' << c.trials << ',' << format_real(c.p_hat)
            << ',' << format_real(c.ci_low) << ',' << format_real(c.ci_high) << ',' << format_real(c.bound_clipped)
            << ',' << (c.dominated() ? 1 : 0) << ',' << (c.vacuous() ? 1 : 0) << '\n';
        failing += c.dominated() ? 0 : 1;
        vacuous += c.vacuous() ? 1 : 0;
    }
    const auto csv_path = out_path(cfg, "montecarlo", ".csv");
    write_text_file(csv_path, csv.str());

    ojson j = header(cfg, "montecarlo");
    j["verdict"] = result.passed() ? "PASS" : "FAIL";
    j["cells"] = result.cells.size();
    j["failing_cells"] = failing;
    j["vacuous_cells"] = vacuous;
    j["replicas"] = plan.replicas;
    j["diverged"] = result.diverged;
    j["params"] = params_json(params);
    j["K1"] = bound.constants().K1;
    j["log_K1"] = bound.constants().log_K1;
    j["K2"] = bound.constants().K2;
    j["checkpoints"] = plan.checkpoints;
    j["median_error"] = result.median_error;
    j["grid_csv"] = csv_path.filename().string();
    const auto text = dump_json(j);
    write_text_file(out_path(cfg, "montecarlo", ".json"), text);
    out << text;
    return result.passed() ? exit_ok : exit_check_failed;
}

int cmd_cramer_check(const RunConfig& cfg, int m_max, std::size_t draws, std::ostream& out)
{
    const auto model = cfg.noise_model();
    if (!model) throw InvalidInput("config.noise: required for cramer-check");
    const auto report = cramer_check(*model, cfg.map.dim(), m_max, draws, cfg.base_seed, cfg.norm);

    const auto rows = [](const std::vector<MomentRow>& v) {
        ojson a = ojson::array();
        for (const auto& r : v) {
            ojson row;
            row["m"] = r.m;
            row["empirical"] = r.empirical;
            row["bound"] = r.bound;
            row["std_error"] = r.std_error;
            row["violated"] = r.violated;
            a.push_back(row);
        }
        return a;
    };
    ojson j = header(cfg, "cramer-check");
    j["family"] = std::string(to_string(model->family()));
    j["sigma"] = model->cramer().sigma;
    j["L"] = model->cramer().L;
    j["mean_norm_bound"] = model->cramer().mean_norm_bound;
    j["overridden"] = report.overridden;
    j["draws"] = draws;
    j["mean_norm"] = report.mean_norm;
    j["mean_norm_std_error"] = report.mean_norm_std_error;
    j["mean_bound_violated"] = report.mean_bound_violated;
    j["moments"] = rows(report.raw);
    j["centered_moments"] = rows(report.centered);
    j["verdict"] = report.ok() ? "PASS" : "FAIL";
    const auto text = dump_json(j);
    write_text_file(out_path(cfg, "cramer-check", ".json"), text);
    out << text;
    return report.ok() ? exit_ok : exit_check_failed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Stochastic Mann fixed-point iteration: trajectories, tail bounds, confidence sets"};
    app.require_subcommand(1);

    std::string config_path;
    Overrides overrides;
    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Configuration file (JSON)")->required();
        sub->add_option("--out", overrides.out_dir, "Output directory (overrides output_dir)");
        sub->add_option("--seed", overrides.seed, "Base seed (overrides base_seed)");
        sub->add_option("--replicas", overrides.replicas, "Monte Carlo replicas");
    };

    auto* iterate = app.add_subcommand("iterate", "Run one trajectory and write it as CSV");
    add_common(iterate);

    std::size_t n = 0;
    std::optional<double> eps;
    auto* bound = app.add_subcommand("bound", "Evaluate the exponential tail bound at (n, eps)");
    add_common(bound);
    bound->add_option("--n", n, "Iteration index n")->required();
    bound->add_option("--eps", eps, "Radius eps")->required();

    std::optional<double> alpha;
    auto* confidence = app.add_subcommand("confidence", "Iteration count and confidence ball for (eps, alpha)");
    add_common(confidence);
    confidence->add_option("--eps", eps, "Radius eps (default: experiment.eps)");
    confidence->add_option("--alpha", alpha, "Level alpha (default: experiment.alpha)");

    auto* montecarlo = app.add_subcommand("montecarlo", "Empirical tail grid against the bound");
    add_common(montecarlo);

    int m_max = 10;
    std::size_t draws = 1'000'000;
    auto* cramer = app.add_subcommand("cramer-check", "Monte Carlo check of the noise moment condition");
    add_common(cramer);
    cramer->add_option("--m-max", m_max, "Largest moment order (2..10)");
    cramer->add_option("--draws", draws, "Number of noise draws (>= 100000)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }

    try {
        const RunConfig cfg = apply_overrides(load_config(config_path), overrides);
        if (iterate->parsed()) return cmd_iterate(cfg, out);
        if (bound->parsed()) return cmd_bound(cfg, n, *eps, out);
        if (confidence->parsed()) {
            const auto e = eps ? eps : cfg.experiment.eps;
            const auto a = alpha ? alpha : cfg.experiment.alpha;
            if (!e) throw InvalidInput("config.experiment.eps: required (or pass --eps)");
            if (!a) throw InvalidInput("config.experiment.alpha: required (or pass --alpha)");
            return cmd_confidence(cfg, *e, *a, out);
        }
        if (montecarlo->parsed()) return cmd_montecarlo(cfg, out);
        return cmd_cramer_check(cfg, m_max, draws, out);
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const DivergedError& e) {
        err << "diverged: " << e.what() << " (last finite n = " << e.last_finite_index() << ")\n";
        return exit_check_failed;
    }
}

}  // namespace smann::cli
