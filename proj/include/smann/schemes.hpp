#pragma once

#include "smann/noise.hpp"
#include "smann/spaces.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace smann {

enum class SchemeKind { picard, krasnoselskii, mann, ishikawa, stochastic_mann };

std::string_view to_string(SchemeKind kind) noexcept;
SchemeKind parse_scheme_kind(std::string_view name);

/// Gains a_n = a/n and b_n = a/n^2 with master gain 0 < a < 1.
struct StepSequences {
    double a = 0.5;

    bool operator==(const StepSequences&) const = default;
};

struct StepSizes {
    double a_n = 0.0;
    double b_n = 0.0;
};

StepSizes step_sizes(const StepSequences& steps, std::size_t n);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::stochastic_mann;
    MapSpec map = MapSpec::inverse_quadratic();
    NormKind norm = NormKind::euclidean;
    Vector x0 = Vector{0.5};
    StepSequences steps{};
    /// Ishikawa only: x_{n+1} = (1-a) x_n + a F(y_n), y_n = (1-b_n) x_n + b_n F(x_n)
    /// with b_n = ishikawa_b / n.
    double ishikawa_b = 0.5;
    std::optional<NoiseModel> noise;
    std::size_t horizon = 1000;
    std::uint64_t seed = 0;

    /// Throws InvalidInput naming the offending field.
    void validate() const;
};

/// Realized sequence. iterates[k] holds x_{k+1} (x_1 = x0), so
/// iterates.size() == horizon + 1. noise_norms[k] = ||xi_{k+1}||, the noise
/// that entered x_{k+2}; empty for deterministic schemes.
struct Trajectory {
    std::vector<Vector> iterates;
    std::vector<double> noise_norms;
    std::optional<std::vector<double>> errors_to_ref;

    const Vector& x(std::size_t n) const { return iterates.at(n - 1); }
};

/// One update x_n -> x_{n+1}. `noise_draw` must be present exactly for stochastic_mann.
Vector step(SchemeKind kind, const Vector& x_n, std::size_t n, const SchemeConfig& cfg,
            const std::optional<Vector>& noise_draw);

/// In-place driver used by run() and the Monte Carlo harness; holds x_n and
/// scratch space so that advancing allocates nothing.
class SchemeRunner {
public:
    explicit SchemeRunner(const SchemeConfig& cfg);

    /// Index n of the iterate currently held.
    std::size_t index() const noexcept { return n_; }
    std::span<const double> state() const noexcept { return x_; }
    /// ||xi_{n-1}|| consumed by the most recent advance(); 0 for deterministic schemes.
    double last_noise_norm() const noexcept { return last_noise_norm_; }

    /// x_n -> x_{n+1}. Throws DivergedError if any coordinate becomes non-finite.
    void advance();
    void advance_to(std::size_t n);

private:
    SchemeConfig cfg_;
    rng::CounterStream stream_;
    std::size_t n_ = 1;
    std::vector<double> x_, fx_, y_, next_, xi_;
    double last_noise_norm_ = 0.0;
};

/// Runs `cfg.horizon` steps from x_1 = x0. Noise for step n is drawn from the
/// counter stream at (cfg.seed, n).
Trajectory run(const SchemeConfig& cfg, const std::optional<Vector>& x_star = std::nullopt);

}  // namespace smann
