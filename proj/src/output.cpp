#include "smann/output.hpp"

#include "smann/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace smann {

std::string format_real(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {

void emit(const nlohmann::ordered_json& j, std::string& out, int indent)
{
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    const std::string close(static_cast<std::size_t>(indent), ' ');
    switch (j.type()) {
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + nlohmann::json(key).dump() + ": ";
            emit(value, out, indent + 2);
        }
        out += "\n" + close + "}";
        return;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        // Scalar arrays stay on one line.
        const bool flat = std::none_of(j.begin(), j.end(), [](const auto& v) { return v.is_structured(); });
        out += flat ? "[" : "[\n";
        bool first = true;
        for (const auto& value : j) {
            if (!first) out += flat ? ", " : ",\n";
            first = false;
            if (!flat) out += pad;
            emit(value, out, indent + 2);
        }
        out += flat ? "]" : "\n" + close + "]";
        return;
    }
    case nlohmann::json::value_t::number_float: {
        const double x = j.get<double>();
        out += std::isfinite(x) ? format_real(x) : "null";
        return;
    }
    default:
        out += j.dump();
        return;
    }
}

}  // namespace

std::string dump_json(const nlohmann::ordered_json& j)
{
    std::string out;
    emit(j, out, 0);
    out += "\n";
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& contents)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + path.string());
    out << contents;
}

}  // namespace smann
