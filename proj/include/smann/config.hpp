#pragma once

#include "smann/bounds.hpp"
#include "smann/montecarlo.hpp"
#include "smann/noise.hpp"
#include "smann/schemes.hpp"
#include "smann/spaces.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smann {

struct NoiseBlock {
    NoiseFamily family = NoiseFamily::zero;
    double parameter = 0.0;  ///< "scale" (gaussian) or "half_width" (bounded_uniform)
    std::optional<double> sigma;
    std::optional<double> L;
    std::optional<double> mean_norm_bound;

    bool operator==(const NoiseBlock&) const = default;
};

/// Overrides for the bound parameters; anything absent is derived from the
/// map, scheme and noise blocks.
struct BoundsBlock {
    std::optional<double> N;
    std::optional<double> rho;
    std::optional<double> c;
    std::optional<double> sigma;
    std::optional<double> L;
    std::optional<double> mean_norm_bound;

    bool operator==(const BoundsBlock&) const = default;
};

struct ExperimentBlock {
    std::vector<std::size_t> checkpoints;
    std::vector<double> eps_grid;
    std::size_t replicas = 1000;
    std::optional<double> alpha;
    std::optional<double> eps;

    bool operator==(const ExperimentBlock&) const = default;
};

struct RunConfig {
    MapSpec map = MapSpec::inverse_quadratic();
    NormKind norm = NormKind::euclidean;

    SchemeKind kind = SchemeKind::stochastic_mann;
    double a = 0.5;
    double ishikawa_b = 0.5;
    Vector x0 = Vector{0.5};
    std::size_t horizon = 1000;
    /// Rows written by `iterate`; every iterate when empty.
    std::vector<std::size_t> output_checkpoints;

    std::optional<NoiseBlock> noise;
    BoundsBlock bounds;
    ExperimentBlock experiment;

    std::string output_dir = "out";
    std::uint64_t base_seed = 0;

    bool operator==(const RunConfig&) const = default;

    /// Scheme with seed = base_seed.
    SchemeConfig scheme_config() const;
    std::optional<NoiseModel> noise_model() const;
    /// Resolves every bound parameter: overrides first, then the map's
    /// contraction constant, the noise model's Cramér constants,
    /// N = ||x0 - x*|| and rho = a(1-c).
    BoundParams bound_params(const Vector& x_star) const;
    ExperimentPlan plan() const;
};

/// Throws InvalidInput whose message starts with the offending field path.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
/// Hash of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& cfg);

}  // namespace smann
