#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace smann {

/// A point of R^d. Always non-empty with finite coordinates.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::vector<double> coords);
    Vector(std::initializer_list<double> coords) : Vector(std::vector<double>(coords)) {}

    static Vector zeros(std::size_t dim);
    static Vector filled(std::size_t dim, double value);

    std::size_t dim() const noexcept { return coords_.size(); }
    std::span<const double> coords() const noexcept { return coords_; }
    double operator[](std::size_t i) const { return coords_[i]; }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> coords_;
};

enum class NormKind { euclidean, max, one };

std::string_view to_string(NormKind kind) noexcept;
NormKind parse_norm_kind(std::string_view name);

/// Throws InvalidInput on non-finite coordinates.
double norm(std::span<const double> v, NormKind kind);
double norm(const Vector& v, NormKind kind);

/// ||v|| without the finiteness check.
double magnitude(std::span<const double> v, NormKind kind) noexcept;

/// ||a - b|| without the finiteness check; callers guarantee finite inputs.
double distance(std::span<const double> a, std::span<const double> b, NormKind kind) noexcept;

/// F(x) = 1 / (1 + x^2) on R.
struct InverseQuadratic {};

/// F(x) = A x + b on R^d, A stored row-major.
struct Affine {
    std::size_t dim = 0;
    std::vector<double> matrix;
    std::vector<double> offset;
};

/// F(x) = lambda * cos(x) on R.
struct ScaledCosine {
    double lambda = 0.0;
};

/// A contraction mapping from the built-in catalog.
class MapSpec {
public:
    using Family = std::variant<InverseQuadratic, Affine, ScaledCosine>;

    static MapSpec inverse_quadratic(std::optional<double> declared_c = std::nullopt);
    /// Requires the spectral norm of A to be below one.
    static MapSpec affine(const std::vector<std::vector<double>>& matrix, std::vector<double> offset,
                          std::optional<double> declared_c = std::nullopt);
    static MapSpec scaled_cosine(double lambda, std::optional<double> declared_c = std::nullopt);

    std::size_t dim() const noexcept;
    const Family& family() const noexcept { return family_; }
    std::string_view family_name() const noexcept;
    std::optional<double> declared_c() const noexcept { return declared_c_; }

    /// out = F(x). No dimension or finiteness checks; the hot path of every scheme.
    void apply(std::span<const double> x, std::span<double> out) const noexcept;

    bool operator==(const MapSpec&) const;

private:
    MapSpec(Family family, std::optional<double> declared_c);

    Family family_;
    std::optional<double> declared_c_;
};

Vector eval_map(const MapSpec& map, const Vector& x);

/// Lipschitz constant of the family under `norm` (9/(8 sqrt 3) for the
/// inverse quadratic, |lambda| for the scaled cosine, the induced operator
/// norm of A for affine maps).
double analytic_contraction(const MapSpec& map, NormKind norm);

/// The constant every bound should use: declared_c when present, else the
/// analytic family constant. Throws InvalidInput if the result is not below one.
double contraction_constant(const MapSpec& map, NormKind norm);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-family box used for contraction checks when the caller has no better one.
std::vector<Interval> default_domain_box(const MapSpec& map);

/// Largest ||F(x) - F(y)|| / ||x - y|| over `samples` uniformly drawn pairs in
/// `box`. Pair k depends only on (seed, k), so the estimate is nondecreasing
/// in `samples`.
double estimate_contraction(const MapSpec& map, std::span<const Interval> box, std::size_t samples,
                            std::uint64_t seed, NormKind norm = NormKind::euclidean);

/// Noise-free Picard iteration from the origin until ||F(x) - x|| <= tol.
Vector reference_fixed_point(const MapSpec& map, double tol, NormKind norm = NormKind::euclidean);

}  // namespace smann
