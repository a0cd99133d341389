#pragma once

#include "smann/rng.hpp"
#include "smann/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace smann {

enum class NoiseFamily { zero, gaussian, bounded_uniform };

std::string_view to_string(NoiseFamily family) noexcept;
NoiseFamily parse_noise_family(std::string_view name);

/// Constants of the moment condition E||xi||^m <= (m!/2) sigma^2 L^(m-2),
/// plus an upper bound on sup_n E||xi_n||.
struct CramerParams {
    double sigma = 0.0;
    double L = 1.0;
    double mean_norm_bound = 0.0;

    bool operator==(const CramerParams&) const = default;
};

/// Admissible constants for a family, certified analytically:
///  - bounded_uniform with ||xi|| <= B a.s.: (B, B, B);
///  - gaussian, d = 1, scale s: (2s, 2s, s*sqrt(2/pi));
///  - gaussian, d > 1: sigma and L scale by sqrt(d) (euclidean, max) or d (one),
///    the mean bound is the exact chi mean (euclidean, max) or d*s*sqrt(2/pi) (one);
///  - zero: (0, 1, 0).
CramerParams default_cramer_params(NoiseFamily family, double parameter, std::size_t dim,
                                   NormKind norm = NormKind::euclidean);

/// Zero-mean i.i.d. noise xi_n on R^d. `parameter` is the per-coordinate
/// scale (gaussian) or half-width (bounded_uniform); ignored for zero.
class NoiseModel {
public:
    static NoiseModel zero();
    static NoiseModel gaussian(double scale, std::size_t dim, NormKind norm = NormKind::euclidean,
                               std::optional<CramerParams> overrides = std::nullopt);
    static NoiseModel bounded_uniform(double half_width, std::size_t dim, NormKind norm = NormKind::euclidean,
                                      std::optional<CramerParams> overrides = std::nullopt);

    NoiseFamily family() const noexcept { return family_; }
    double parameter() const noexcept { return parameter_; }
    const CramerParams& cramer() const noexcept { return cramer_; }
    /// True when (sigma, L, mean bound) came from the user rather than the family defaults.
    bool overridden() const noexcept { return overridden_; }

    /// Fills `out` with xi for the given stream position. Pure in (stream.seed, index).
    void sample_into(const rng::CounterStream& stream, std::uint64_t index, std::span<double> out) const noexcept;

    bool operator==(const NoiseModel&) const = default;

private:
    NoiseModel(NoiseFamily family, double parameter, CramerParams cramer, bool overridden);

    NoiseFamily family_ = NoiseFamily::zero;
    double parameter_ = 0.0;
    CramerParams cramer_{};
    bool overridden_ = false;
};

Vector sample(const NoiseModel& model, std::size_t dim, std::uint64_t seed, std::uint64_t index);

struct MomentRow {
    int m = 0;
    double empirical = 0.0;
    double bound = 0.0;
    double std_error = 0.0;  ///< bootstrap standard error of `empirical`
    bool violated = false;   ///< empirical > bound + 3 * std_error
};

struct CramerReport {
    /// E||xi||^m against (m!/2) sigma^2 L^(m-2).
    std::vector<MomentRow> raw;
    /// E|zeta|^m with zeta = ||xi|| - E||xi||, against 2 m! sigma^2 (2L)^(m-2).
    std::vector<MomentRow> centered;
    double mean_norm = 0.0;
    double mean_norm_std_error = 0.0;
    bool mean_bound_violated = false;  ///< mean_norm > mean_norm_bound + 4 * std_error
    bool overridden = false;

    bool ok() const noexcept;
};

/// Monte Carlo check of the moment condition for m = 2..m_max.
/// Requires 2 <= m_max <= 10 and draws >= 100000.
CramerReport cramer_check(const NoiseModel& model, std::size_t dim, int m_max, std::size_t draws,
                          std::uint64_t seed, NormKind norm = NormKind::euclidean,
                          std::size_t bootstrap_resamples = 64);

}  // namespace smann
