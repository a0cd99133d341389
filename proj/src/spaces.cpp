#include "smann/spaces.hpp"

#include "smann/errors.hpp"
#include "smann/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

namespace smann {

namespace {

void require_finite(std::span<const double> v, const char* what)
{
    for (double x : v) {
        if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite coordinate");
    }
}

void check_declared(std::optional<double> c)
{
    if (c && !(*c >= 0.0 && *c < 1.0))
        throw InvalidInput("declared_c must lie in [0, 1)");
}

double affine_operator_norm(const Affine& f, NormKind kind)
{
    const auto d = static_cast<Eigen::Index>(f.dim);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(
        f.matrix.data(), d, d);
    switch (kind) {
    case NormKind::euclidean:
        if (d == 0) return 0.0;
        return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    case NormKind::max:
        return a.cwiseAbs().rowwise().sum().maxCoeff();
    case NormKind::one:
        return a.cwiseAbs().colwise().sum().maxCoeff();
    }
    return 0.0;
}

}  // namespace

Vector::Vector(std::vector<double> coords) : coords_(std::move(coords))
{
    if (coords_.empty()) throw InvalidInput("vector: dimension must be positive");
    require_finite(coords_, "vector");
}

Vector Vector::zeros(std::size_t dim) { return filled(dim, 0.0); }

Vector Vector::filled(std::size_t dim, double value) { return Vector(std::vector<double>(dim, value)); }

std::string_view to_string(NormKind kind) noexcept
{
    switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::max: return "max";
    case NormKind::one: return "one";
    }
    return "euclidean";
}

NormKind parse_norm_kind(std::string_view name)
{
    if (name == "euclidean") return NormKind::euclidean;
    if (name == "max") return NormKind::max;
    if (name == "one") return NormKind::one;
    throw InvalidInput("unknown norm '" + std::string(name) + "' (expected euclidean, max or one)");
}

double norm(std::span<const double> v, NormKind kind)
{
    require_finite(v, "norm");
    return magnitude(v, kind);
}

double magnitude(std::span<const double> v, NormKind kind) noexcept
{
    double acc = 0.0;
    switch (kind) {
    case NormKind::euclidean:
        if (v.size() == 1) return std::abs(v[0]);
        for (double x : v) acc += x * x;
        return std::sqrt(acc);
    case NormKind::max:
        for (double x : v) acc = std::max(acc, std::abs(x));
        return acc;
    case NormKind::one:
        for (double x : v) acc += std::abs(x);
        return acc;
    }
    return acc;
}

double norm(const Vector& v, NormKind kind) { return norm(v.coords(), kind); }

double distance(std::span<const double> a, std::span<const double> b, NormKind kind) noexcept
{
    const std::size_t d = a.size();
    if (d == 1) return std::abs(a[0] - b[0]);
    double acc = 0.0;
    switch (kind) {
    case NormKind::euclidean:
        // hypot-style scaling is unnecessary for the magnitudes that occur here
        for (std::size_t i = 0; i < d; ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(acc);
    case NormKind::max:
        for (std::size_t i = 0; i < d; ++i) acc = std::max(acc, std::abs(a[i] - b[i]));
        return acc;
    case NormKind::one:
        for (std::size_t i = 0; i < d; ++i) acc += std::abs(a[i] - b[i]);
        return acc;
    }
    return acc;
}

MapSpec::MapSpec(Family family, std::optional<double> declared_c)
    : family_(std::move(family)), declared_c_(declared_c)
{
    check_declared(declared_c_);
}

MapSpec MapSpec::inverse_quadratic(std::optional<double> declared_c)
{
    MapSpec m(InverseQuadratic{}, declared_c);
    if (declared_c && *declared_c < analytic_contraction(m, NormKind::euclidean) - 1e-12)
        throw InvalidInput("declared_c is below the Lipschitz constant 9/(8*sqrt(3)) of 1/(1+x^2)");
    return m;
}

MapSpec MapSpec::affine(const std::vector<std::vector<double>>& matrix, std::vector<double> offset,
                        std::optional<double> declared_c)
{
    const std::size_t d = offset.size();
    if (d == 0) throw InvalidInput("affine: offset must be non-empty");
    if (matrix.size() != d) throw InvalidInput("affine: matrix must be d x d with d = len(offset)");
    Affine f{d, {}, std::move(offset)};
    f.matrix.reserve(d * d);
    for (const auto& row : matrix) {
        if (row.size() != d) throw InvalidInput("affine: matrix must be d x d with d = len(offset)");
        f.matrix.insert(f.matrix.end(), row.begin(), row.end());
    }
    require_finite(f.matrix, "affine matrix");
    require_finite(f.offset, "affine offset");
    if (affine_operator_norm(f, NormKind::euclidean) >= 1.0)
        throw InvalidInput("affine: operator norm of A must be < 1");
    MapSpec m(std::move(f), declared_c);
    return m;
}

MapSpec MapSpec::scaled_cosine(double lambda, std::optional<double> declared_c)
{
    if (!(std::abs(lambda) < 1.0)) throw InvalidInput("scaled_cosine: |lambda| must be < 1");
    if (declared_c && *declared_c < std::abs(lambda) - 1e-12)
        throw InvalidInput("declared_c is below |lambda| for scaled_cosine");
    return MapSpec(ScaledCosine{lambda}, declared_c);
}

std::size_t MapSpec::dim() const noexcept
{
    if (const auto* f = std::get_if<Affine>(&family_)) return f->dim;
    return 1;
}

std::string_view MapSpec::family_name() const noexcept
{
    switch (family_.index()) {
    case 0: return "inverse_quadratic";
    case 1: return "affine";
    default: return "scaled_cosine";
    }
}

void MapSpec::apply(std::span<const double> x, std::span<double> out) const noexcept
{
    switch (family_.index()) {
    case 0:
        out[0] = 1.0 / (1.0 + x[0] * x[0]);
        return;
    case 1: {
        const auto& f = std::get<Affine>(family_);
        const double* row = f.matrix.data();
        for (std::size_t i = 0; i < f.dim; ++i, row += f.dim) {
            double acc = f.offset[i];
            for (std::size_t j = 0; j < f.dim; ++j) acc += row[j] * x[j];
            out[i] = acc;
        }
        return;
    }
    default:
        out[0] = std::get<ScaledCosine>(family_).lambda * std::cos(x[0]);
        return;
    }
}

bool MapSpec::operator==(const MapSpec& other) const
{
    if (declared_c_ != other.declared_c_ || family_.index() != other.family_.index()) return false;
    if (const auto* f = std::get_if<Affine>(&family_)) {
        const auto& g = std::get<Affine>(other.family_);
        return f->dim == g.dim && f->matrix == g.matrix && f->offset == g.offset;
    }
    if (const auto* f = std::get_if<ScaledCosine>(&family_))
        return f->lambda == std::get<ScaledCosine>(other.family_).lambda;
    return true;
}

Vector eval_map(const MapSpec& map, const Vector& x)
{
    if (x.dim() != map.dim())
        throw InvalidInput("eval_map: dimension mismatch (map " + std::to_string(map.dim()) + ", x " +
                           std::to_string(x.dim()) + ")");
    std::vector<double> out(map.dim());
    map.apply(x.coords(), out);
    return Vector(std::move(out));
}

double analytic_contraction(const MapSpec& map, NormKind norm)
{
    switch (map.family().index()) {
    case 0:
        // sup |F'(x)| = |F'(1/sqrt 3)|
        return 9.0 / (8.0 * std::sqrt(3.0));
    case 1:
        return affine_operator_norm(std::get<Affine>(map.family()), norm);
    default:
        return std::abs(std::get<ScaledCosine>(map.family()).lambda);
    }
}

double contraction_constant(const MapSpec& map, NormKind norm)
{
    const double analytic = analytic_contraction(map, norm);
    if (const auto declared = map.declared_c()) {
        if (*declared < analytic - 1e-12)
            throw InvalidInput("declared_c " + std::to_string(*declared) +
                               " is below the analytic constant under the " + std::string(to_string(norm)) +
                               " norm");
        return *declared;
    }
    if (!(analytic < 1.0))
        throw InvalidInput("map is not a contraction under the " + std::string(to_string(norm)) + " norm");
    return analytic;
}

std::vector<Interval> default_domain_box(const MapSpec& map)
{
    switch (map.family().index()) {
    case 0: return {{-10.0, 10.0}};
    case 1: return std::vector<Interval>(map.dim(), Interval{-10.0, 10.0});
    default: return {{-3.141592653589793, 3.141592653589793}};
    }
}

double estimate_contraction(const MapSpec& map, std::span<const Interval> box, std::size_t samples,
                            std::uint64_t seed, NormKind norm)
{
    if (samples < 2) throw InvalidInput("estimate_contraction: samples must be >= 2");
    const std::size_t d = map.dim();
    if (box.size() != d) throw InvalidInput("estimate_contraction: box dimension mismatch");
    for (const auto& iv : box) {
        if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || !(iv.hi > iv.lo))
            throw InvalidInput("estimate_contraction: degenerate domain box");
    }

    const rng::CounterStream stream{seed};
    std::vector<double> x(d), y(d), fx(d), fy(d);
    double best = 0.0;
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
            const double w = box[i].hi - box[i].lo;
            x[i] = box[i].lo + w * stream.uniform(k, i);
            y[i] = box[i].lo + w * stream.uniform(k, d + i);
        }
        const double dx = distance(x, y, norm);
        if (dx == 0.0) continue;
        map.apply(x, fx);
        map.apply(y, fy);
        best = std::max(best, distance(fx, fy, norm) / dx);
    }
    return best;
}

Vector reference_fixed_point(const MapSpec& map, double tol, NormKind norm)
{
    if (!(tol > 0.0)) throw InvalidInput("reference_fixed_point: tol must be > 0");
    const double c = contraction_constant(map, norm);

    const std::size_t d = map.dim();
    std::vector<double> x(d, 0.0), fx(d);
    map.apply(x, fx);
    double residual = distance(fx, x, norm);
    // c^k * r0 <= tol within this many steps in exact arithmetic; the extra
    // factor leaves room for rounding before declaring tol unreachable.
    const double needed = c > 0.0 ? std::log(tol / std::max(residual, tol)) / std::log(c) : 1.0;
    const auto max_iter = static_cast<std::size_t>(4.0 * needed) + 1000;
    for (std::size_t k = 0; residual > tol; ++k) {
        if (k >= max_iter)
            throw DomainError("reference_fixed_point: tolerance below attainable floating-point precision");
        x.swap(fx);
        map.apply(x, fx);
        residual = distance(fx, x, norm);
    }
    // ||F(F(x)) - F(x)|| <= c * residual, so the last image is at least as good.
    return Vector(std::move(fx));
}

}  // namespace smann
