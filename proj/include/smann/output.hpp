#pragma once

#include <json.hpp>

#include <filesystem>
#include <ostream>
#include <string>

namespace smann {

/// %.17g; "nan", "inf" and "-inf" for non-finite values.
std::string format_real(double x);

/// JSON text with two-space indentation and every floating-point number at
/// 17 significant digits. Non-finite numbers become null.
std::string dump_json(const nlohmann::ordered_json& j);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace smann
