#include "smann/config.hpp"

#include "smann/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>

namespace smann {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message)
{
    throw InvalidInput(path + ": " + message);
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> keys)
{
    if (!obj.is_object()) fail(path, "must be an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (auto k : keys) known = known || item.key() == k;
        if (!known) fail(path + "." + item.key(), "unknown key");
    }
}

const json& require(const json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) fail(path + "." + key, "missing required field");
    return obj.at(key);
}

double as_real(const json& v, const std::string& path)
{
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
}

std::optional<double> opt_real(const json& obj, const std::string& path, const char* key)
{
    if (!obj.contains(key)) return std::nullopt;
    return as_real(obj.at(key), path + "." + key);
}

std::uint64_t as_unsigned(const json& v, const std::string& path)
{
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    fail(path, "must be a non-negative integer");
}

std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string()) fail(path, "must be a string");
    return v.get<std::string>();
}

std::vector<double> real_list(const json& v, const std::string& path)
{
    if (!v.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::size_t> index_list(const json& v, const std::string& path)
{
    if (!v.is_array()) fail(path, "must be an array of integers");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(static_cast<std::size_t>(as_unsigned(v[i], path + "[" + std::to_string(i) + "]")));
    return out;
}

// Re-labels errors thrown by domain constructors with the config path.
template <typename F>
auto at_path(const std::string& path, F&& f)
{
    try {
        return f();
    } catch (const InvalidInput& e) {
        const std::string msg = e.what();
        if (msg.rfind("config", 0) == 0) throw;
        fail(path, msg);
    }
}

MapSpec parse_map(const json& j)
{
    const std::string path = "config.map";
    allow_keys(j, path, {"family", "declared_c", "matrix", "offset", "lambda"});
    const auto family = as_string(require(j, path, "family"), path + ".family");
    const auto declared = opt_real(j, path, "declared_c");
    if (family == "inverse_quadratic") {
        for (const char* k : {"matrix", "offset", "lambda"})
            if (j.contains(k)) fail(path + "." + k, "not a parameter of inverse_quadratic");
        return at_path(path, [&] { return MapSpec::inverse_quadratic(declared); });
    }
    if (family == "affine") {
        if (j.contains("lambda")) fail(path + ".lambda", "not a parameter of affine");
        const auto& m = require(j, path, "matrix");
        if (!m.is_array()) fail(path + ".matrix", "must be an array of rows");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < m.size(); ++i)
            rows.push_back(real_list(m[i], path + ".matrix[" + std::to_string(i) + "]"));
        auto offset = real_list(require(j, path, "offset"), path + ".offset");
        return at_path(path, [&] { return MapSpec::affine(rows, offset, declared); });
    }
    if (family == "scaled_cosine") {
        for (const char* k : {"matrix", "offset"})
            if (j.contains(k)) fail(path + "." + k, "not a parameter of scaled_cosine");
        const double lambda = as_real(require(j, path, "lambda"), path + ".lambda");
        return at_path(path, [&] { return MapSpec::scaled_cosine(lambda, declared); });
    }
    fail(path + ".family", "unknown family '" + family + "'");
}

json map_to_json(const MapSpec& m)
{
    nlohmann::ordered_json j;
    j["family"] = std::string(m.family_name());
    if (const auto* f = std::get_if<Affine>(&m.family())) {
        json rows = json::array();
        for (std::size_t i = 0; i < f->dim; ++i)
            rows.push_back(std::vector<double>(f->matrix.begin() + static_cast<std::ptrdiff_t>(i * f->dim),
                                               f->matrix.begin() + static_cast<std::ptrdiff_t>((i + 1) * f->dim)));
        j["matrix"] = rows;
        j["offset"] = f->offset;
    }
    if (const auto* f = std::get_if<ScaledCosine>(&m.family())) j["lambda"] = f->lambda;
    if (m.declared_c()) j["declared_c"] = *m.declared_c();
    return j;
}

NoiseBlock parse_noise(const json& j)
{
    const std::string path = "config.noise";
    allow_keys(j, path, {"family", "scale", "half_width", "sigma", "L", "mean_norm_bound"});
    NoiseBlock b;
    b.family = at_path(path + ".family", [&] { return parse_noise_family(as_string(require(j, path, "family"), path + ".family")); });
    const char* own = b.family == NoiseFamily::gaussian ? "scale"
                      : b.family == NoiseFamily::bounded_uniform ? "half_width"
                                                                 : nullptr;
    for (const char* k : {"scale", "half_width"})
        if (j.contains(k) && (own == nullptr || std::string_view(k) != own))
            fail(path + "." + k, "not a parameter of " + std::string(to_string(b.family)));
    if (own) {
        b.parameter = as_real(require(j, path, own), path + "." + own);
        if (!(b.parameter > 0.0)) fail(path + "." + own, "must be > 0");
    }
    b.sigma = opt_real(j, path, "sigma");
    b.L = opt_real(j, path, "L");
    b.mean_norm_bound = opt_real(j, path, "mean_norm_bound");
    return b;
}

}  // namespace

RunConfig parse_config(const json& j)
{
    allow_keys(j, "config", {"map", "norm", "scheme", "noise", "bounds", "experiment", "output_dir", "base_seed"});
    RunConfig cfg;
    cfg.map = parse_map(require(j, "config", "map"));
    if (j.contains("norm"))
        cfg.norm = at_path("config.norm", [&] { return parse_norm_kind(as_string(j.at("norm"), "config.norm")); });

    {
        const std::string path = "config.scheme";
        const auto& s = require(j, "config", "scheme");
        allow_keys(s, path, {"kind", "a", "ishikawa_b", "x0", "horizon", "checkpoints"});
        cfg.kind = at_path(path + ".kind", [&] { return parse_scheme_kind(as_string(require(s, path, "kind"), path + ".kind")); });
        if (s.contains("a")) cfg.a = as_real(s.at("a"), path + ".a");
        if (s.contains("ishikawa_b")) cfg.ishikawa_b = as_real(s.at("ishikawa_b"), path + ".ishikawa_b");
        cfg.x0 = at_path(path + ".x0", [&] { return Vector(real_list(require(s, path, "x0"), path + ".x0")); });
        cfg.horizon = static_cast<std::size_t>(as_unsigned(require(s, path, "horizon"), path + ".horizon"));
        if (s.contains("checkpoints")) cfg.output_checkpoints = index_list(s.at("checkpoints"), path + ".checkpoints");
    }

    if (j.contains("noise")) cfg.noise = parse_noise(j.at("noise"));

    if (j.contains("bounds")) {
        const std::string path = "config.bounds";
        const auto& b = j.at("bounds");
        allow_keys(b, path, {"N", "rho", "c", "sigma", "L", "mean_norm_bound"});
        cfg.bounds.N = opt_real(b, path, "N");
        cfg.bounds.rho = opt_real(b, path, "rho");
        cfg.bounds.c = opt_real(b, path, "c");
        cfg.bounds.sigma = opt_real(b, path, "sigma");
        cfg.bounds.L = opt_real(b, path, "L");
        cfg.bounds.mean_norm_bound = opt_real(b, path, "mean_norm_bound");
    }

    if (j.contains("experiment")) {
        const std::string path = "config.experiment";
        const auto& e = j.at("experiment");
        allow_keys(e, path, {"checkpoints", "eps_grid", "replicas", "alpha", "eps"});
        if (e.contains("checkpoints")) cfg.experiment.checkpoints = index_list(e.at("checkpoints"), path + ".checkpoints");
        if (e.contains("eps_grid")) cfg.experiment.eps_grid = real_list(e.at("eps_grid"), path + ".eps_grid");
        if (e.contains("replicas"))
            cfg.experiment.replicas = static_cast<std::size_t>(as_unsigned(e.at("replicas"), path + ".replicas"));
        cfg.experiment.alpha = opt_real(e, path, "alpha");
        cfg.experiment.eps = opt_real(e, path, "eps");
    }

    if (j.contains("output_dir")) cfg.output_dir = as_string(j.at("output_dir"), "config.output_dir");
    if (j.contains("base_seed")) cfg.base_seed = as_unsigned(j.at("base_seed"), "config.base_seed");

    // Cross-field checks belong to the owning modules; run them now so that
    // errors surface at load time with a field path.
    try {
        cfg.scheme_config().validate();
    } catch (const InvalidInput& e) {
        // Scheme messages already start with a field path relative to the root.
        throw InvalidInput("config." + std::string(e.what()));
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InvalidInput("config: parse error in " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json to_json(const RunConfig& cfg)
{
    nlohmann::ordered_json j;
    j["map"] = map_to_json(cfg.map);
    j["norm"] = std::string(to_string(cfg.norm));

    nlohmann::ordered_json s;
    s["kind"] = std::string(to_string(cfg.kind));
    s["a"] = cfg.a;
    s["ishikawa_b"] = cfg.ishikawa_b;
    s["x0"] = std::vector<double>(cfg.x0.coords().begin(), cfg.x0.coords().end());
    s["horizon"] = cfg.horizon;
    if (!cfg.output_checkpoints.empty()) s["checkpoints"] = cfg.output_checkpoints;
    j["scheme"] = s;

    if (cfg.noise) {
        nlohmann::ordered_json n;
        n["family"] = std::string(to_string(cfg.noise->family));
        if (cfg.noise->family == NoiseFamily::gaussian) n["scale"] = cfg.noise->parameter;
        if (cfg.noise->family == NoiseFamily::bounded_uniform) n["half_width"] = cfg.noise->parameter;
        if (cfg.noise->sigma) n["sigma"] = *cfg.noise->sigma;
        if (cfg.noise->L) n["L"] = *cfg.noise->L;
        if (cfg.noise->mean_norm_bound) n["mean_norm_bound"] = *cfg.noise->mean_norm_bound;
        j["noise"] = n;
    }

    nlohmann::ordered_json b = nlohmann::ordered_json::object();
    const auto put = [&](const char* key, const std::optional<double>& v) {
        if (v) b[key] = *v;
    };
    put("N", cfg.bounds.N);
    put("rho", cfg.bounds.rho);
    put("c", cfg.bounds.c);
    put("sigma", cfg.bounds.sigma);
    put("L", cfg.bounds.L);
    put("mean_norm_bound", cfg.bounds.mean_norm_bound);
    j["bounds"] = b;

    nlohmann::ordered_json e;
    e["checkpoints"] = cfg.experiment.checkpoints;
    e["eps_grid"] = cfg.experiment.eps_grid;
    e["replicas"] = cfg.experiment.replicas;
    if (cfg.experiment.alpha) e["alpha"] = *cfg.experiment.alpha;
    if (cfg.experiment.eps) e["eps"] = *cfg.experiment.eps;
    j["experiment"] = e;

    j["output_dir"] = cfg.output_dir;
    j["base_seed"] = cfg.base_seed;
    return j;
}

std::optional<NoiseModel> RunConfig::noise_model() const
{
    if (!noise) return std::nullopt;
    const std::size_t d = map.dim();
    if (noise->family == NoiseFamily::zero) return NoiseModel::zero();
    const auto defaults = default_cramer_params(noise->family, noise->parameter, d, norm);
    std::optional<CramerParams> overrides;
    if (noise->sigma || noise->L || noise->mean_norm_bound)
        overrides = CramerParams{noise->sigma.value_or(defaults.sigma), noise->L.value_or(defaults.L),
                                 noise->mean_norm_bound.value_or(defaults.mean_norm_bound)};
    return at_path("config.noise", [&] {
        return noise->family == NoiseFamily::gaussian ? NoiseModel::gaussian(noise->parameter, d, norm, overrides)
                                                      : NoiseModel::bounded_uniform(noise->parameter, d, norm, overrides);
    });
}

SchemeConfig RunConfig::scheme_config() const
{
    SchemeConfig s;
    s.kind = kind;
    s.map = map;
    s.norm = norm;
    s.x0 = x0;
    s.steps.a = a;
    s.ishikawa_b = ishikawa_b;
    s.noise = noise_model();
    s.horizon = horizon;
    s.seed = base_seed;
    return s;
}

BoundParams RunConfig::bound_params(const Vector& x_star) const
{
    BoundParams p;
    p.a = a;
    p.c = bounds.c ? *bounds.c : at_path("config.map", [&] { return contraction_constant(map, norm); });
    const auto model = noise_model();
    const CramerParams cramer = model ? model->cramer() : CramerParams{0.0, 1.0, 0.0};
    p.sigma = bounds.sigma.value_or(cramer.sigma);
    p.L = bounds.L.value_or(cramer.L);
    p.mean_norm_bound = bounds.mean_norm_bound.value_or(cramer.mean_norm_bound);
    p.N = bounds.N ? *bounds.N : distance(x0.coords(), x_star.coords(), norm);
    p.rho = bounds.rho.value_or(p.contraction_gap());
    at_path("config.bounds", [&] { p.validate(); return 0; });
    return p;
}

ExperimentPlan RunConfig::plan() const
{
    ExperimentPlan plan;
    plan.scheme = scheme_config();
    plan.checkpoints = experiment.checkpoints;
    plan.eps_grid = experiment.eps_grid;
    plan.replicas = experiment.replicas;
    plan.base_seed = base_seed;
    at_path("config.experiment", [&] { plan.validate(); return 0; });
    return plan;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const RunConfig& cfg)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(to_json(cfg).dump())));
    return buf;
}

}  // namespace smann
