#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rspde/lattice.hpp"

namespace rspde {

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double v);

/// CSV `k,i1[,i2[,i3]],value`, one row per interior point in natural order (k is 1-based).
std::string grid_to_csv(const GridField& f);
GridField grid_from_csv(const std::string& text);

/// `{"d":..,"n":..,"values":[..]}`
nlohmann::json grid_to_json(const GridField& f);
GridField grid_from_json(const nlohmann::json& j);

/// Reads a GridField from a .csv or .json file.
GridField read_grid_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rspde
