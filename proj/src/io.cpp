#include "rspde/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rspde {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string grid_to_csv(const GridField& f) {
    const GridSpec& spec = f.spec();
    std::string out = "k";
    for (int j = 1; j <= spec.dim(); ++j) out += ",i" + std::to_string(j);
    out += ",value\n";
    for (std::size_t k = 0; k < f.size(); ++k) {
        const MultiIndex i = unrank(k + 1, spec);
        out += std::to_string(k + 1);
        for (int j = 0; j < spec.dim(); ++j) out += "," + std::to_string(i[j]);
        out += "," + format_double(f[k]) + "\n";
    }
    return out;
}

GridField grid_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty grid CSV");
    int columns = 1;
    for (char c : line) columns += c == ',' ? 1 : 0;
    const int dim = columns - 2;
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("grid CSV header must be k,i1[,i2[,i3]],value");

    std::vector<MultiIndex> indices;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        if (static_cast<int>(cells.size()) != columns) throw std::invalid_argument("ragged grid CSV row: " + line);
        MultiIndex i{1, 1, 1};
        for (int j = 0; j < dim; ++j) i[j] = std::stoi(cells[static_cast<std::size_t>(j + 1)]);
        indices.push_back(i);
        values.push_back(std::stod(cells.back()));
    }
    const double root = std::pow(static_cast<double>(values.size()), 1.0 / dim);
    const int n = static_cast<int>(std::lround(root)) + 1;
    const GridSpec spec(dim, n);
    if (spec.interior_count() != values.size()) throw std::invalid_argument("grid CSV row count is not (n-1)^d");
    GridField f(spec);
    for (std::size_t r = 0; r < values.size(); ++r) f[storage_index(indices[r], spec)] = values[r];
    return f;
}

nlohmann::json grid_to_json(const GridField& f) {
    nlohmann::json j;
    j["d"] = f.spec().dim();
    j["n"] = f.spec().n();
    j["values"] = std::vector<double>(f.values().begin(), f.values().end());
    return j;
}

GridField grid_from_json(const nlohmann::json& j) {
    const GridSpec spec(j.at("d").get<int>(), j.at("n").get<int>());
    return GridField(spec, j.at("values").get<std::vector<double>>());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GridField read_grid_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    if (path.extension() == ".json") return grid_from_json(nlohmann::json::parse(text));
    return grid_from_csv(text);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace rspde
