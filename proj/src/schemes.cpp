#include "smann/schemes.hpp"

#include "smann/errors.hpp"

#include <cmath>
#include <string>

namespace smann {

std::string_view to_string(SchemeKind kind) noexcept
{
    switch (kind) {
    case SchemeKind::picard: return "picard";
    case SchemeKind::krasnoselskii: return "krasnoselskii";
    case SchemeKind::mann: return "mann";
    case SchemeKind::ishikawa: return "ishikawa";
    case SchemeKind::stochastic_mann: return "stochastic_mann";
    }
    return "picard";
}

SchemeKind parse_scheme_kind(std::string_view name)
{
    if (name == "picard") return SchemeKind::picard;
    if (name == "krasnoselskii") return SchemeKind::krasnoselskii;
    if (name == "mann") return SchemeKind::mann;
    if (name == "ishikawa") return SchemeKind::ishikawa;
    if (name == "stochastic_mann") return SchemeKind::stochastic_mann;
    throw InvalidInput("unknown scheme kind '" + std::string(name) + "'");
}

StepSizes step_sizes(const StepSequences& steps, std::size_t n)
{
    const auto nn = static_cast<double>(n);
    return {steps.a / nn, steps.a / (nn * nn)};
}

void SchemeConfig::validate() const
{
    if (!(steps.a > 0.0 && steps.a < 1.0)) throw InvalidInput("scheme.a: must lie in (0, 1)");
    if (kind == SchemeKind::ishikawa && !(ishikawa_b > 0.0 && ishikawa_b < 1.0))
        throw InvalidInput("scheme.ishikawa_b: must lie in (0, 1)");
    if (horizon < 1) throw InvalidInput("scheme.horizon: must be >= 1");
    if (x0.dim() != map.dim())
        throw InvalidInput("scheme.x0: dimension " + std::to_string(x0.dim()) + " does not match map dimension " +
                           std::to_string(map.dim()));
    if (kind == SchemeKind::stochastic_mann && !noise)
        throw InvalidInput("noise: required when scheme.kind is stochastic_mann");
    if (kind != SchemeKind::stochastic_mann && noise)
        throw InvalidInput("noise: only allowed when scheme.kind is stochastic_mann");
}

namespace {

// x_next from x for every rule; fx and y are scratch of the same size.
void apply_rule(const SchemeConfig& cfg, std::size_t n, std::span<const double> x, std::span<const double> xi,
                std::span<double> fx, std::span<double> y, std::span<double> x_next)
{
    const std::size_t d = x.size();
    cfg.map.apply(x, fx);
    switch (cfg.kind) {
    case SchemeKind::picard:
        for (std::size_t i = 0; i < d; ++i) x_next[i] = fx[i];
        return;
    case SchemeKind::krasnoselskii:
        for (std::size_t i = 0; i < d; ++i) x_next[i] = 0.5 * (fx[i] + x[i]);
        return;
    case SchemeKind::mann: {
        const auto [a_n, b_n] = step_sizes(cfg.steps, n);
        for (std::size_t i = 0; i < d; ++i) x_next[i] = (1.0 - a_n) * x[i] + a_n * fx[i];
        return;
    }
    case SchemeKind::ishikawa: {
        const double a = cfg.steps.a;
        const double b_n = cfg.ishikawa_b / static_cast<double>(n);
        for (std::size_t i = 0; i < d; ++i) y[i] = (1.0 - b_n) * x[i] + b_n * fx[i];
        cfg.map.apply(y, fx);
        for (std::size_t i = 0; i < d; ++i) x_next[i] = (1.0 - a) * x[i] + a * fx[i];
        return;
    }
    case SchemeKind::stochastic_mann: {
        const auto [a_n, b_n] = step_sizes(cfg.steps, n);
        for (std::size_t i = 0; i < d; ++i) x_next[i] = (1.0 - a_n) * x[i] + a_n * fx[i] + b_n * xi[i];
        return;
    }
    }
}

}  // namespace

Vector step(SchemeKind kind, const Vector& x_n, std::size_t n, const SchemeConfig& cfg,
            const std::optional<Vector>& noise_draw)
{
    if (n < 1) throw InvalidInput("step: n must be >= 1");
    if (x_n.dim() != cfg.map.dim()) throw InvalidInput("step: dimension mismatch between x_n and map");
    if (kind == SchemeKind::stochastic_mann) {
        if (!noise_draw) throw InvalidInput("step: noise_draw is required for stochastic_mann");
        if (noise_draw->dim() != x_n.dim()) throw InvalidInput("step: dimension mismatch between noise and x_n");
    } else if (noise_draw) {
        throw InvalidInput("step: noise_draw is only accepted for stochastic_mann");
    }
    SchemeConfig local = cfg;
    local.kind = kind;
    const std::size_t d = x_n.dim();
    std::vector<double> fx(d), y(d), out(d);
    const std::vector<double> zero(d, 0.0);
    apply_rule(local, n, x_n.coords(), noise_draw ? noise_draw->coords() : std::span<const double>(zero), fx, y,
               out);
    for (double v : out)
        if (!std::isfinite(v)) throw DivergedError("step: non-finite iterate", n);
    return Vector(std::move(out));
}

SchemeRunner::SchemeRunner(const SchemeConfig& cfg)
    : cfg_(cfg), stream_{cfg.seed}, x_(cfg.x0.coords().begin(), cfg.x0.coords().end())
{
    cfg_.validate();
    const std::size_t d = x_.size();
    fx_.resize(d);
    y_.resize(d);
    next_.resize(d);
    xi_.assign(d, 0.0);
}

void SchemeRunner::advance()
{
    if (cfg_.noise) {
        cfg_.noise->sample_into(stream_, n_, xi_);
        last_noise_norm_ = magnitude(xi_, cfg_.norm);
    }
    apply_rule(cfg_, n_, x_, xi_, fx_, y_, next_);
    x_.swap(next_);
    for (double v : x_)
        if (!std::isfinite(v))
            throw DivergedError("iterate became non-finite at n = " + std::to_string(n_ + 1), n_);
    ++n_;
}

void SchemeRunner::advance_to(std::size_t n)
{
    while (n_ < n) advance();
}

Trajectory run(const SchemeConfig& cfg, const std::optional<Vector>& x_star)
{
    SchemeRunner runner(cfg);
    if (x_star && x_star->dim() != cfg.map.dim()) throw InvalidInput("run: x_star dimension mismatch");

    Trajectory t;
    t.iterates.reserve(cfg.horizon + 1);
    t.iterates.push_back(cfg.x0);
    if (cfg.noise) t.noise_norms.reserve(cfg.horizon);
    for (std::size_t k = 0; k < cfg.horizon; ++k) {
        runner.advance();
        const auto s = runner.state();
        t.iterates.emplace_back(std::vector<double>(s.begin(), s.end()));
        if (cfg.noise) t.noise_norms.push_back(runner.last_noise_norm());
    }
    if (x_star) {
        std::vector<double> errors;
        errors.reserve(t.iterates.size());
        for (const auto& x : t.iterates) errors.push_back(distance(x.coords(), x_star->coords(), cfg.norm));
        t.errors_to_ref = std::move(errors);
    }
    return t;
}

}  // namespace smann
