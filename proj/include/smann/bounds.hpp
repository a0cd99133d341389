#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace smann {

/// Inputs of every closed-form bound for the stochastic Mann scheme with
/// a_n = a/n, b_n = a/n^2.
struct BoundParams {
    double N = 1.0;                ///< upper bound on ||x_1 - x*||
    double a = 0.5;                ///< master gain, 0 < a < 1
    double c = 0.0;                ///< contraction constant, 0 <= c < 1
    double sigma = 0.0;            ///< Cramér sigma
    double L = 1.0;                ///< Cramér L
    double mean_norm_bound = 0.0;  ///< bound on max_i E||xi_i||
    double rho = 0.1;              ///< 0 < rho < 2a(1-c)

    /// Throws DomainError if rho is outside (0, 2a(1-c)), InvalidInput for the other fields.
    void validate() const;

    double contraction_gap() const noexcept { return a * (1.0 - c); }
    /// 2a(1-c) - rho: the exponent of n in the exponential tail inequality.
    double tail_exponent() const noexcept { return 2.0 * contraction_gap() - rho; }
    /// a(1-c) - rho: the exponent used by the almost-complete and rate statements.
    double rate_exponent() const noexcept { return contraction_gap() - rho; }

    bool operator==(const BoundParams&) const = default;
};

struct ProductBound {
    double lhs = 1.0;  ///< prod_{j=i+1}^{n} (1 - a(1-c)/j)
    double rhs = 1.0;  ///< ((i+1)/(n+1))^{a(1-c)}
};

/// Both sides of the product inequality. Requires 1 <= i <= n, 0 < a < 1, 0 <= c < 1.
ProductBound product_bound(std::size_t i, std::size_t n, double a, double c);

/// Right-hand side of the pathwise error envelope
///   N prod_{i=1}^{n} f_i + sum_{i=1}^{n} (a/i^2) prod_{j=i+1}^{n} f_j ||xi_i||,
/// f_j = 1 - a(1-c)/j, with noise_norms[i-1] = ||xi_i||. Evaluated term by term.
double deterministic_envelope(std::size_t n, const BoundParams& params, std::span<const double> noise_norms);

/// Envelope values for n = 0..noise_norms.size() (entry 0 is N), by the
/// one-step recursion E_{n+1} = f_n E_n + (a/n^2) ||xi_n||.
std::vector<double> envelope_sequence(const BoundParams& params, std::span<const double> noise_norms);

struct SeriesValue {
    double value = 0.0;
    std::size_t terms = 0;     ///< number of explicitly summed terms M
    double error_bound = 0.0;  ///< certified bound on |value - true sum|
};

/// sum_{i>=1} (i+1)^p / i^q for 0 <= p <= 2 and q - p > 1: explicit sum to M
/// plus a tail expanded binomially into Hurwitz zeta values, each evaluated
/// by Euler-Maclaurin with its remainder bound.
SeriesValue power_ratio_series(double p, double q, double tol);

/// S1 = sum (i+1)^{a(1-c)} / i^2. DomainError when a(1-c) >= 1.
SeriesValue series_S1(double a, double c, double tol);
/// S2 = 4 a^2 sigma^2 sum (i+1)^{2a(1-c)} / i^4. Exactly 0 when sigma = 0.
SeriesValue series_S2(double a, double c, double sigma, double tol);

struct ConstantsK {
    double K1 = 1.0;      ///< exp(2(N^2 + (a S1 mean_norm_bound)^2)); +inf on overflow
    double log_K1 = 0.0;  ///< always finite
    double K2 = 1.0;      ///< min(1, 1/(16 S2)), 1 when S2 = 0
};

ConstantsK constants_K(const BoundParams& params, double S1, double S2);

struct BoundReport {
    double S1 = 0.0;
    double S2 = 0.0;
    double K1 = 1.0;
    double log_K1 = 0.0;
    double K2 = 1.0;
    double exponent = 0.0;  ///< 2a(1-c) - rho
    double raw_bound = 1.0;
    double log_raw_bound = 0.0;
    double clipped_bound = 1.0;
};

/// Precomputes S1, S2, K1, K2 for one parameter set so that repeated
/// evaluations in n and eps are cheap.
class TailBound {
public:
    static constexpr double series_tol = 1e-12;

    explicit TailBound(const BoundParams& params);

    const BoundParams& params() const noexcept { return params_; }
    double S1() const noexcept { return s1_.value; }
    double S2() const noexcept { return s2_.value; }
    const ConstantsK& constants() const noexcept { return k_; }

    /// log(K1) - K2 n^{exponent} eps^2, evaluated in log form so huge K1 and n stay finite.
    double log_raw(double n, double eps, double exponent) const noexcept;
    /// Tail exponent 2a(1-c) - rho.
    double log_raw(double n, double eps) const noexcept { return log_raw(n, eps, params_.tail_exponent()); }

    BoundReport report(std::size_t n, double eps) const;

private:
    BoundParams params_;
    SeriesValue s1_;
    SeriesValue s2_;
    ConstantsK k_;
};

/// K1 exp(-K2 n^{2a(1-c)-rho} eps^2) and its clipped version.
BoundReport tail_bound(std::size_t n, double eps, const BoundParams& params);

inline constexpr std::uint64_t default_search_cap = 1'000'000'000'000ULL;

/// Smallest n <= n_cap with clipped tail bound <= alpha, by doubling then
/// bisection. nullopt when no such n exists.
std::optional<std::uint64_t> min_iterations_for_confidence(double eps, double alpha, const BoundParams& params,
                                                           std::uint64_t n_cap = default_search_cap);
std::optional<std::uint64_t> min_iterations_for_confidence(double eps, double alpha, const TailBound& bound,
                                                           std::uint64_t n_cap = default_search_cap);

/// eps0 * sqrt(ln n / n^{a(1-c)-rho}). Requires n >= 2 and 0 < rho < a(1-c).
double rate_envelope(double n, double eps0, const BoundParams& params);

/// sqrt((1 + d) / K2), d > 0.
double canonical_eps0(double d, double K2);

}  // namespace smann
