#include "smann/bounds.hpp"

#include "smann/errors.hpp"

#include <algorithm>
#include <array>
#include <cfloat>
#include <cmath>
#include <limits>
#include <string>

namespace smann {

void BoundParams::validate() const
{
    if (!(N >= 0.0) || !std::isfinite(N)) throw InvalidInput("bounds.N: must be finite and >= 0");
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("bounds.a: must lie in (0, 1)");
    if (!(c >= 0.0 && c < 1.0)) throw InvalidInput("bounds.c: must lie in [0, 1)");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw InvalidInput("bounds.sigma: must be finite and >= 0");
    if (!(L > 0.0) || !std::isfinite(L)) throw InvalidInput("bounds.L: must be finite and > 0");
    if (!(mean_norm_bound >= 0.0) || !std::isfinite(mean_norm_bound))
        throw InvalidInput("bounds.mean_norm_bound: must be finite and >= 0");
    if (!(rho > 0.0 && rho < 2.0 * contraction_gap()))
        throw DomainError("bounds.rho: must lie in (0, 2a(1-c)) = (0, " + std::to_string(2.0 * contraction_gap()) +
                          ")");
}

ProductBound product_bound(std::size_t i, std::size_t n, double a, double c)
{
    if (i < 1 || i > n) throw InvalidInput("product_bound: requires 1 <= i <= n");
    if (!(a > 0.0 && a < 1.0)) throw InvalidInput("product_bound: a must lie in (0, 1)");
    if (!(c >= 0.0 && c < 1.0)) throw InvalidInput("product_bound: c must lie in [0, 1)");
    const double g = a * (1.0 - c);
    ProductBound out;
    for (std::size_t j = i + 1; j <= n; ++j) out.lhs *= 1.0 - g / static_cast<double>(j);
    out.rhs = std::pow(static_cast<double>(i + 1) / static_cast<double>(n + 1), g);
    return out;
}

double deterministic_envelope(std::size_t n, const BoundParams& params, std::span<const double> noise_norms)
{
    if (noise_norms.size() < n) throw InvalidInput("deterministic_envelope: need at least n noise norms");
    const double g = params.contraction_gap();
    // Walk i = n..1 so that `tail` is prod_{j=i+1}^{n} f_j when term i is added.
    double tail = 1.0;
    double sum = 0.0;
    for (std::size_t i = n; i >= 1; --i) {
        const double xi = noise_norms[i - 1];
        if (!(xi >= 0.0)) throw InvalidInput("deterministic_envelope: negative noise norm");
        const auto di = static_cast<double>(i);
        sum += params.a / (di * di) * tail * xi;
        tail *= 1.0 - g / di;
    }
    return params.N * tail + sum;
}

std::vector<double> envelope_sequence(const BoundParams& params, std::span<const double> noise_norms)
{
    const double g = params.contraction_gap();
    std::vector<double> out;
    out.reserve(noise_norms.size() + 1);
    out.push_back(params.N);
    for (std::size_t i = 1; i <= noise_norms.size(); ++i) {
        const double xi = noise_norms[i - 1];
        if (!(xi >= 0.0)) throw InvalidInput("envelope_sequence: negative noise norm");
        const auto di = static_cast<double>(i);
        out.push_back((1.0 - g / di) * out.back() + params.a / (di * di) * xi);
    }
    return out;
}

namespace {

using real = long double;

// B_2, B_4, ..., B_10
constexpr std::array<real, 5> bernoulli_even{1.0L / 6, -1.0L / 30, 1.0L / 42, -1.0L / 30, 5.0L / 66};

struct Bounded {
    real value;
    real error;
};

// sum_{i>=start} i^{-s}, s > 1, start >= 1, Euler-Maclaurin with four
// correction terms; the remainder is bounded by the first omitted one.
Bounded hurwitz_zeta(real s, real start)
{
    real value = std::pow(start, 1 - s) / (s - 1) + std::pow(start, -s) / 2;
    real rising = s;  // (s)_{2j-1}
    real fact = 2;    // (2j)!
    real power = std::pow(start, -s - 1);
    real term = 0;
    for (std::size_t j = 1; j <= bernoulli_even.size(); ++j) {
        term = bernoulli_even[j - 1] / fact * rising * power;
        if (j == bernoulli_even.size()) break;
        value += term;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= (2 * j + 1) * (2 * j + 2);
        power /= start * start;
    }
    return {value, std::abs(term)};
}

}  // namespace

SeriesValue power_ratio_series(double p, double q, double tol)
{
    if (!(tol > 0.0)) throw InvalidInput("series: tol must be > 0");
    if (!(p >= 0.0 && p <= 2.0)) throw DomainError("series: exponent p must lie in [0, 2]");
    if (!(q - p > 1.0)) throw DomainError("series: diverges unless q - p > 1");

    for (std::size_t m = 1000; m <= 10'000'000; m *= 10) {
        real partial = 0;
        for (std::size_t i = m; i >= 1; --i) {
            const auto x = static_cast<real>(i);
            partial += std::pow(x + 1, static_cast<real>(p)) / std::pow(x, static_cast<real>(q));
        }

        // (1 + 1/i)^p = sum_k C(p,k) i^{-k} for i > m >= 1, so the tail is
        // sum_k C(p,k) zeta(q - p + k, m + 1).
        const auto start = static_cast<real>(m + 1);
        const real s = static_cast<real>(q) - static_cast<real>(p);
        real tail = 0;
        real error = 0;
        real binom = 1;
        std::size_t k = 0;
        for (;; ++k) {
            if (k > 0) binom *= (static_cast<real>(p) - static_cast<real>(k) + 1) / static_cast<real>(k);
            const auto z = hurwitz_zeta(s + static_cast<real>(k), start);
            tail += binom * z.value;
            error += std::abs(binom) * z.error;
            // |C(p,k)| <= 2 for p in [0, 2] and zeta(s+k, m+1) <= 2 (m+1)^{1-s-k},
            // so the dropped terms sum to at most 4 (m+1)^{-s-k} / (1 - 1/(m+1)).
            const real dropped = 4 * std::pow(start, -s - static_cast<real>(k)) / (1 - 1 / start);
            if (dropped < static_cast<real>(tol) * 1e-3L || k >= 60) {
                error += dropped;
                break;
            }
        }

        const real total = partial + tail;
        const auto value = static_cast<double>(total);
        error += static_cast<real>(m) * LDBL_EPSILON * total;
        error += std::abs(total - static_cast<real>(value));
        if (error <= static_cast<real>(tol)) return {value, m, static_cast<double>(error)};
    }
    throw DomainError("series: tolerance " + std::to_string(tol) + " is below attainable precision");
}

SeriesValue series_S1(double a, double c, double tol)
{
    if (!(a > 0.0) || !(c >= 0.0 && c < 1.0)) throw InvalidInput("series_S1: requires a > 0 and 0 <= c < 1");
    if (!(a * (1.0 - c) < 1.0)) throw DomainError("series_S1: diverges for a(1-c) >= 1");
    return power_ratio_series(a * (1.0 - c), 2.0, tol);
}

SeriesValue series_S2(double a, double c, double sigma, double tol)
{
    if (!(a > 0.0) || !(c >= 0.0 && c < 1.0)) throw InvalidInput("series_S2: requires a > 0 and 0 <= c < 1");
    if (!(sigma >= 0.0)) throw InvalidInput("series_S2: sigma must be >= 0");
    if (!(a * (1.0 - c) < 1.0)) throw DomainError("series_S2: requires a(1-c) < 1");
    if (sigma == 0.0) return {0.0, 0, 0.0};
    const double prefactor = 4.0 * a * a * sigma * sigma;
    auto inner = power_ratio_series(2.0 * a * (1.0 - c), 4.0, tol / prefactor);
    inner.value *= prefactor;
    inner.error_bound *= prefactor;
    return inner;
}

ConstantsK constants_K(const BoundParams& params, double S1, double S2)
{
    ConstantsK k;
    const double drift = params.a * S1 * params.mean_norm_bound;
    k.log_K1 = 2.0 * (params.N * params.N + drift * drift);
    k.K1 = std::exp(k.log_K1);
    k.K2 = S2 > 0.0 ? std::min(1.0, 1.0 / (16.0 * S2)) : 1.0;
    return k;
}

TailBound::TailBound(const BoundParams& params) : params_(params)
{
    params_.validate();
    s1_ = series_S1(params_.a, params_.c, series_tol);
    s2_ = series_S2(params_.a, params_.c, params_.sigma, series_tol);
    k_ = constants_K(params_, s1_.value, s2_.value);
}

double TailBound::log_raw(double n, double eps, double exponent) const noexcept
{
    return k_.log_K1 - k_.K2 * std::exp(exponent * std::log(n)) * eps * eps;
}

BoundReport TailBound::report(std::size_t n, double eps) const
{
    if (n < 1) throw InvalidInput("tail_bound: n must be >= 1");
    if (!(eps > 0.0)) throw InvalidInput("tail_bound: eps must be > 0");
    BoundReport r;
    r.S1 = s1_.value;
    r.S2 = s2_.value;
    r.K1 = k_.K1;
    r.log_K1 = k_.log_K1;
    r.K2 = k_.K2;
    r.exponent = params_.tail_exponent();
    r.log_raw_bound = log_raw(static_cast<double>(n), eps);
    r.raw_bound = std::exp(r.log_raw_bound);
    r.clipped_bound = std::min(1.0, r.raw_bound);
    return r;
}

BoundReport tail_bound(std::size_t n, double eps, const BoundParams& params)
{
    return TailBound(params).report(n, eps);
}

std::optional<std::uint64_t> min_iterations_for_confidence(double eps, double alpha, const TailBound& bound,
                                                           std::uint64_t n_cap)
{
    if (!(eps > 0.0)) throw InvalidInput("min_iterations_for_confidence: eps must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("min_iterations_for_confidence: alpha must lie in (0, 1)");
    if (n_cap < 1) return std::nullopt;

    // Clipping is irrelevant because alpha < 1.
    const double log_alpha = std::log(alpha);
    const auto ok = [&](std::uint64_t n) { return bound.log_raw(static_cast<double>(n), eps) <= log_alpha; };

    if (ok(1)) return 1;
    std::uint64_t lo = 1;  // !ok(lo)
    std::uint64_t hi = 2;
    while (hi < n_cap && !ok(hi)) {
        lo = hi;
        hi = hi > n_cap / 2 ? n_cap : hi * 2;
    }
    hi = std::min(hi, n_cap);
    if (!ok(hi)) return std::nullopt;
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::optional<std::uint64_t> min_iterations_for_confidence(double eps, double alpha, const BoundParams& params,
                                                           std::uint64_t n_cap)
{
    return min_iterations_for_confidence(eps, alpha, TailBound(params), n_cap);
}

double rate_envelope(double n, double eps0, const BoundParams& params)
{
    if (!(n >= 2.0)) throw DomainError("rate_envelope: requires n >= 2");
    if (!(params.rho > 0.0 && params.rho < params.contraction_gap()))
        throw DomainError("rate_envelope: requires 0 < rho < a(1-c)");
    if (!(eps0 >= 0.0)) throw InvalidInput("rate_envelope: eps0 must be >= 0");
    return eps0 * std::sqrt(std::log(n) / std::pow(n, params.rate_exponent()));
}

double canonical_eps0(double d, double K2)
{
    if (!(d > 0.0)) throw InvalidInput("canonical_eps0: d must be > 0");
    if (!(K2 > 0.0)) throw InvalidInput("canonical_eps0: K2 must be > 0");
    return std::sqrt((1.0 + d) / K2);
}

}  // namespace smann
