#include "smann/noise.hpp"

#include "smann/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace smann {

namespace {

double factorial(int m)
{
    double f = 1.0;
    for (int k = 2; k <= m; ++k) f *= k;
    return f;
}

void require_positive(double v, const char* what)
{
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidInput(std::string(what) + " must be finite and > 0");
}

void check_overrides(const CramerParams& p)
{
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma)) throw InvalidInput("noise.sigma must be >= 0");
    require_positive(p.L, "noise.L");
    if (!(p.mean_norm_bound >= 0.0) || !std::isfinite(p.mean_norm_bound))
        throw InvalidInput("noise.mean_norm_bound must be >= 0");
}

// Bootstrap standard errors of the sample means of values[k]^m, m = 2..m_max.
std::vector<double> bootstrap_moment_errors(const std::vector<double>& values, int m_max, std::size_t resamples,
                                            std::uint64_t seed)
{
    const std::size_t n = values.size();
    const auto count = static_cast<std::size_t>(m_max - 1);
    std::vector<double> sum(count, 0.0), sum_sq(count, 0.0), acc(count);
    const rng::CounterStream stream{rng::derive_seed(seed, 0xB007)};
    for (std::size_t b = 0; b < resamples; ++b) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double v = values[stream.bits(b, k) % n];
            double p = v * v;
            for (std::size_t j = 0; j < count; ++j, p *= v) acc[j] += p;
        }
        for (std::size_t j = 0; j < count; ++j) {
            const double mean = acc[j] / static_cast<double>(n);
            sum[j] += mean;
            sum_sq[j] += mean * mean;
        }
    }
    std::vector<double> se(count);
    const auto r = static_cast<double>(resamples);
    for (std::size_t j = 0; j < count; ++j) {
        const double mean = sum[j] / r;
        se[j] = std::sqrt(std::max(0.0, (sum_sq[j] / r - mean * mean) * r / (r - 1.0)));
    }
    return se;
}

std::vector<MomentRow> moment_rows(const std::vector<double>& values, int m_max, std::size_t resamples,
                                   std::uint64_t seed, auto&& bound_of)
{
    const auto count = static_cast<std::size_t>(m_max - 1);
    std::vector<double> moments(count, 0.0);
    for (double v : values) {
        double p = v * v;
        for (std::size_t j = 0; j < count; ++j, p *= v) moments[j] += p;
    }
    const auto se = bootstrap_moment_errors(values, m_max, resamples, seed);
    std::vector<MomentRow> rows;
    for (std::size_t j = 0; j < count; ++j) {
        const int m = static_cast<int>(j) + 2;
        MomentRow row{m, moments[j] / static_cast<double>(values.size()), bound_of(m), se[j], false};
        row.violated = row.empirical > row.bound + 3.0 * row.std_error;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string_view to_string(NoiseFamily family) noexcept
{
    switch (family) {
    case NoiseFamily::zero: return "zero";
    case NoiseFamily::gaussian: return "gaussian";
    case NoiseFamily::bounded_uniform: return "bounded_uniform";
    }
    return "zero";
}

NoiseFamily parse_noise_family(std::string_view name)
{
    if (name == "zero") return NoiseFamily::zero;
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "bounded_uniform") return NoiseFamily::bounded_uniform;
    throw InvalidInput("unknown noise family '" + std::string(name) +
                       "' (expected zero, gaussian or bounded_uniform)");
}

CramerParams default_cramer_params(NoiseFamily family, double parameter, std::size_t dim, NormKind norm)
{
    if (dim == 0) throw InvalidInput("noise: dim must be positive");
    const auto d = static_cast<double>(dim);
    switch (family) {
    case NoiseFamily::zero:
        return {0.0, 1.0, 0.0};
    case NoiseFamily::bounded_uniform: {
        require_positive(parameter, "noise.half_width");
        const double factor = norm == NormKind::euclidean ? std::sqrt(d) : norm == NormKind::max ? 1.0 : d;
        const double b = parameter * factor;
        return {b, b, b};
    }
    case NoiseFamily::gaussian: {
        require_positive(parameter, "noise.scale");
        const double s = parameter;
        const double half_normal_mean = s * std::sqrt(2.0 / std::numbers::pi);
        if (dim == 1) return {2.0 * s, 2.0 * s, half_normal_mean};
        if (norm == NormKind::one) return {2.0 * s * d, 2.0 * s * d, d * half_normal_mean};
        // E||xi||_2 = s * sqrt(2) * Gamma((d+1)/2) / Gamma(d/2), and ||.||_max <= ||.||_2
        const double chi_mean = s * std::sqrt(2.0) * std::exp(std::lgamma((d + 1.0) / 2.0) - std::lgamma(d / 2.0));
        return {2.0 * s * std::sqrt(d), 2.0 * s * std::sqrt(d), chi_mean};
    }
    }
    return {};
}

NoiseModel::NoiseModel(NoiseFamily family, double parameter, CramerParams cramer, bool overridden)
    : family_(family), parameter_(parameter), cramer_(cramer), overridden_(overridden)
{
}

NoiseModel NoiseModel::zero() { return NoiseModel(NoiseFamily::zero, 0.0, {0.0, 1.0, 0.0}, false); }

NoiseModel NoiseModel::gaussian(double scale, std::size_t dim, NormKind norm, std::optional<CramerParams> overrides)
{
    const auto defaults = default_cramer_params(NoiseFamily::gaussian, scale, dim, norm);
    if (overrides) check_overrides(*overrides);
    return NoiseModel(NoiseFamily::gaussian, scale, overrides.value_or(defaults),
                      overrides.has_value() && *overrides != defaults);
}

NoiseModel NoiseModel::bounded_uniform(double half_width, std::size_t dim, NormKind norm,
                                       std::optional<CramerParams> overrides)
{
    const auto defaults = default_cramer_params(NoiseFamily::bounded_uniform, half_width, dim, norm);
    if (overrides) check_overrides(*overrides);
    return NoiseModel(NoiseFamily::bounded_uniform, half_width, overrides.value_or(defaults),
                      overrides.has_value() && *overrides != defaults);
}

void NoiseModel::sample_into(const rng::CounterStream& stream, std::uint64_t index,
                             std::span<double> out) const noexcept
{
    switch (family_) {
    case NoiseFamily::zero:
        std::fill(out.begin(), out.end(), 0.0);
        return;
    case NoiseFamily::gaussian:
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = parameter_ * stream.normal(index, j);
        return;
    case NoiseFamily::bounded_uniform:
        for (std::size_t j = 0; j < out.size(); ++j) out[j] = parameter_ * (2.0 * stream.uniform(index, j) - 1.0);
        return;
    }
}

Vector sample(const NoiseModel& model, std::size_t dim, std::uint64_t seed, std::uint64_t index)
{
    std::vector<double> out(dim);
    model.sample_into(rng::CounterStream{seed}, index, out);
    return Vector(std::move(out));
}

bool CramerReport::ok() const noexcept
{
    for (const auto& r : raw)
        if (r.violated) return false;
    for (const auto& r : centered)
        if (r.violated) return false;
    return !mean_bound_violated;
}

CramerReport cramer_check(const NoiseModel& model, std::size_t dim, int m_max, std::size_t draws,
                          std::uint64_t seed, NormKind norm_kind, std::size_t bootstrap_resamples)
{
    if (m_max < 2 || m_max > 10) throw InvalidInput("cramer_check: m_max must lie in [2, 10]");
    if (draws < 100000) throw InvalidInput("cramer_check: draws must be >= 100000");
    if (bootstrap_resamples < 2) throw InvalidInput("cramer_check: need at least 2 bootstrap resamples");

    const rng::CounterStream stream{seed};
    std::vector<double> norms(draws);
    std::vector<double> xi(dim);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        model.sample_into(stream, k, xi);
        norms[k] = norm(xi, norm_kind);
        sum += norms[k];
        sum_sq += norms[k] * norms[k];
    }
    const auto n = static_cast<double>(draws);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));

    const auto& p = model.cramer();
    CramerReport report;
    report.mean_norm = mean;
    report.mean_norm_std_error = std::sqrt(var / n);
    report.mean_bound_violated = mean > p.mean_norm_bound + 4.0 * report.mean_norm_std_error;
    report.overridden = model.overridden();
    report.raw = moment_rows(norms, m_max, bootstrap_resamples, seed, [&](int m) {
        return factorial(m) / 2.0 * p.sigma * p.sigma * std::pow(p.L, m - 2);
    });

    std::vector<double> centered(draws);
    for (std::size_t k = 0; k < draws; ++k) centered[k] = std::abs(norms[k] - mean);
    report.centered = moment_rows(centered, m_max, bootstrap_resamples, rng::derive_seed(seed, 1), [&](int m) {
        return 2.0 * factorial(m) * p.sigma * p.sigma * std::pow(2.0 * p.L, m - 2);
    });
    return report;
}

}  // namespace smann
