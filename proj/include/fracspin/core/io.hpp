#pragma once

// File formats shared by the library and the CLI:
//  - comment-headed single/two-column CSV for series and curves
//  - a binary tensor container: one JSON manifest line, then named
//    little-endian float64 arrays, with an FNV-1a payload checksum.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fracspin::core {

inline std::uint64_t fnv1a(const unsigned char* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct NamedArray {
    std::string name;
    std::vector<long> dims;
    std::vector<double> data;
};

// Container layout: manifest JSON + '\n', then each array's raw doubles in
// manifest order. Little-endian hosts only; written bytes round-trip exactly.
inline void save_container(const std::string& path, nlohmann::json manifest,
                           const std::vector<NamedArray>& arrays) {
    static_assert(sizeof(double) == 8);
    nlohmann::json arr_desc = nlohmann::json::array();
    std::uint64_t checksum = 0xcbf29ce484222325ULL;
    for (const auto& a : arrays) {
        std::size_t count = 1;
        for (long d : a.dims)
            count *= static_cast<std::size_t>(d);
        if (count != a.data.size())
            throw std::invalid_argument("save_container: dims mismatch for " + a.name);
        arr_desc.push_back({{"name", a.name}, {"dims", a.dims}});
        checksum = fnv1a(reinterpret_cast<const unsigned char*>(a.data.data()),
                         a.data.size() * sizeof(double), checksum);
    }
    manifest["arrays"] = arr_desc;
    std::ostringstream cs;
    cs << std::hex << checksum;
    manifest["checksum"] = cs.str();

    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("save_container: cannot open " + path);
    f << manifest.dump() << '\n';
    for (const auto& a : arrays)
        f.write(reinterpret_cast<const char*>(a.data.data()),
                static_cast<std::streamsize>(a.data.size() * sizeof(double)));
    if (!f)
        throw std::runtime_error("save_container: write failed for " + path);
}

struct Container {
    nlohmann::json manifest;
    std::vector<NamedArray> arrays;

    const NamedArray& array(const std::string& name) const {
        for (const auto& a : arrays)
            if (a.name == name)
                return a;
        throw std::runtime_error("container: missing array " + name);
    }
};

inline Container load_container(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw std::runtime_error("load_container: cannot open " + path);
    std::string line;
    if (!std::getline(f, line))
        throw std::runtime_error("load_container: missing manifest in " + path);
    Container c;
    c.manifest = nlohmann::json::parse(line);
    std::uint64_t checksum = 0xcbf29ce484222325ULL;
    for (const auto& d : c.manifest.at("arrays")) {
        NamedArray a;
        a.name = d.at("name").get<std::string>();
        a.dims = d.at("dims").get<std::vector<long>>();
        std::size_t count = 1;
        for (long dim : a.dims)
            count *= static_cast<std::size_t>(dim);
        a.data.resize(count);
        f.read(reinterpret_cast<char*>(a.data.data()),
               static_cast<std::streamsize>(count * sizeof(double)));
        if (!f)
            throw std::runtime_error("load_container: truncated array " + a.name);
        checksum = fnv1a(reinterpret_cast<const unsigned char*>(a.data.data()),
                         a.data.size() * sizeof(double), checksum);
        c.arrays.push_back(std::move(a));
    }
    std::ostringstream cs;
    cs << std::hex << checksum;
    if (c.manifest.contains("checksum") &&
        c.manifest["checksum"].get<std::string>() != cs.str())
        throw std::runtime_error("load_container: checksum mismatch in " + path +
                                 " (corrupt state file)");
    return c;
}

// Single- or two-column CSV with "# key=value ..." comment header lines.
inline void save_csv(const std::string& path,
                     const std::vector<std::pair<std::string, std::string>>& header,
                     const std::vector<std::vector<double>>& columns,
                     const std::string& column_names = "") {
    std::ofstream f(path);
    if (!f)
        throw std::runtime_error("save_csv: cannot open " + path);
    if (!header.empty()) {
        f << "#";
        for (const auto& [k, v] : header)
            f << ' ' << k << '=' << v;
        f << '\n';
    }
    if (!column_names.empty())
        f << column_names << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns[0].size();
    f.precision(17);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c)
                f << ',';
            f << columns[c][r];
        }
        f << '\n';
    }
}

struct CsvData {
    std::map<std::string, std::string> header;
    std::vector<std::vector<double>> columns;
};

inline CsvData load_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("load_csv: cannot open " + path);
    CsvData out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string tok;
            while (ss >> tok) {
                auto eq = tok.find('=');
                if (eq != std::string::npos)
                    out.header[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        if (!line.empty() && !(std::isdigit(line[0]) || line[0] == '-' || line[0] == '+' || line[0] == '.'))
            continue;  // column-name row
        std::istringstream ss(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ss, cell, ',')) {
            if (out.columns.size() <= col)
                out.columns.emplace_back();
            out.columns[col].push_back(std::stod(cell));
            ++col;
        }
    }
    return out;
}

} // namespace fracspin::core
