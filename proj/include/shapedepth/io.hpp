#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "shapedepth/deepest.hpp"
#include "shapedepth/depth.hpp"
#include "shapedepth/errors.hpp"
#include "shapedepth/inference.hpp"
#include "shapedepth/mcd.hpp"
#include "shapedepth/spd.hpp"

// File formats: dataset CSV (optional leading "group" column), shape-matrix
// JSON, calibration JSON, result CSV/JSON emitters, and the run manifest.
// Parsing is strict; NaN and ragged rows are rejected.

namespace shapedepth {

using nlohmann::json;

struct DataSet {
    Eigen::MatrixXd rows;
    std::vector<std::string> groups;  // empty when the file has no group column

    bool has_groups() const { return !groups.empty(); }
    int k() const { return static_cast<int>(rows.cols()); }
    int n() const { return static_cast<int>(rows.rows()); }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline double parse_strict_double(const std::string& cell, int line_no) {
    if (cell.empty()) throw parse_error("csv line " + std::to_string(line_no) + ": empty cell");
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(cell, &consumed);
    } catch (const std::exception&) {
        throw parse_error("csv line " + std::to_string(line_no) + ": not a number: '" + cell + "'");
    }
    if (consumed != cell.size())
        throw parse_error("csv line " + std::to_string(line_no) + ": trailing characters in '" + cell + "'");
    if (!std::isfinite(value))
        throw parse_error("csv line " + std::to_string(line_no) + ": non-finite value rejected");
    return value;
}

inline bool cell_is_numeric(const std::string& cell) {
    if (cell.empty()) return false;
    std::size_t consumed = 0;
    try {
        const double v = std::stod(cell, &consumed);
        (void)v;
    } catch (const std::exception&) {
        return false;
    }
    return consumed == cell.size();
}

// %.12g, enough digits to reproduce every value these files carry.
inline std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

// One observation per row, k numeric columns. An optional single header line
// is allowed; when its first cell is "group" the first column holds group
// labels.
inline DataSet load_data_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open data file: " + path);

    DataSet data;
    std::vector<std::vector<double>> values;
    std::string line;
    int line_no = 0;
    bool group_column = false;
    bool saw_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_csv_line(line);
        if (cells.empty()) continue;
        if (line_no == 1 && !detail::cell_is_numeric(cells.back())) {
            saw_header = true;
            group_column = (cells.front() == "group");
            continue;
        }
        std::size_t first_numeric = 0;
        if (group_column) {
            data.groups.push_back(cells.front());
            first_numeric = 1;
        }
        std::vector<double> row;
        row.reserve(cells.size() - first_numeric);
        for (std::size_t c = first_numeric; c < cells.size(); ++c)
            row.push_back(detail::parse_strict_double(cells[c], line_no));
        if (row.empty()) throw parse_error("csv line " + std::to_string(line_no) + ": no numeric columns");
        if (!values.empty() && row.size() != values.front().size())
            throw parse_error("csv line " + std::to_string(line_no) + ": ragged row");
        values.push_back(std::move(row));
    }
    (void)saw_header;
    if (values.empty()) throw parse_error("data file has no observations: " + path);

    data.rows.resize(values.size(), values.front().size());
    for (std::size_t i = 0; i < values.size(); ++i)
        for (std::size_t j = 0; j < values.front().size(); ++j) data.rows(i, j) = values[i][j];
    return data;
}

inline void save_data_csv(const std::string& path, const DataSet& data) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write data file: " + path);
    const int k = data.k();
    if (data.has_groups()) out << "group";
    for (int c = 0; c < k; ++c) {
        if (data.has_groups() || c > 0) out << ",";
        out << "x" << (c + 1);
    }
    out << "\n";
    for (int i = 0; i < data.n(); ++i) {
        if (data.has_groups()) out << data.groups[static_cast<std::size_t>(i)] << ",";
        for (int c = 0; c < k; ++c) {
            if (c > 0) out << ",";
            out << detail::fmt12(data.rows(i, c));
        }
        out << "\n";
    }
}

// {"k": int, "entries": [[row-major]], "normalize": bool?}
inline ShapeMatrix shape_from_json(const json& j) {
    if (!j.is_object() || !j.contains("k") || !j.contains("entries"))
        throw parse_error("shape json: expected an object with \"k\" and \"entries\"");
    const int k = j.at("k").get<int>();
    const auto& rows = j.at("entries");
    if (!rows.is_array() || static_cast<int>(rows.size()) != k)
        throw parse_error("shape json: \"entries\" must be a k x k array");
    Eigen::MatrixXd m(k, k);
    for (int i = 0; i < k; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != k)
            throw parse_error("shape json: row " + std::to_string(i) + " must have k entries");
        for (int c = 0; c < k; ++c) m(i, c) = rows[i][c].get<double>();
    }
    if (j.value("normalize", false)) return normalize_to_shape(m);
    return ShapeMatrix(m);
}

inline ShapeMatrix load_shape_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open shape file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("shape json parse failure in " + path + ": " + e.what());
    }
    return shape_from_json(j);
}

inline json shape_to_json(const ShapeMatrix& v) {
    json rows = json::array();
    for (int i = 0; i < v.dim(); ++i) {
        json row = json::array();
        for (int c = 0; c < v.dim(); ++c) row.push_back(v.entries()(i, c));
        rows.push_back(std::move(row));
    }
    return json{{"k", v.dim()}, {"entries", std::move(rows)}};
}

inline json calibration_to_json(const Calibration& c) {
    return json{{"k", c.k},           {"n", c.n},
                {"alpha", c.alpha},   {"t_crit", c.t_crit},
                {"gamma_rand", c.gamma_rand}, {"replicates", c.replicates},
                {"seed", c.seed}};
}

inline Calibration calibration_from_json(const json& j) {
    Calibration c;
    try {
        c.k = j.at("k").get<int>();
        c.n = j.at("n").get<int>();
        c.alpha = j.at("alpha").get<double>();
        c.t_crit = j.at("t_crit").get<double>();
        c.gamma_rand = j.at("gamma_rand").get<double>();
        c.replicates = j.at("replicates").get<std::int64_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw parse_error(std::string("calibration json: ") + e.what());
    }
    return c;
}

inline Calibration load_calibration_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open calibration file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw parse_error("calibration json parse failure in " + path + ": " + e.what());
    }
    return calibration_from_json(j);
}

inline json deepest_result_to_json(const DeepestShapeResult& r) {
    return json{{"shape", shape_to_json(r.shape)},
                {"depth", r.depth.str()},
                {"evaluations", r.evaluations},
                {"plateau_size", r.plateau_size}};
}

inline json mcd_result_to_json(const McdResult& r) {
    json scatter = json::array();
    for (Eigen::Index i = 0; i < r.scatter.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index c = 0; c < r.scatter.cols(); ++c) row.push_back(r.scatter(i, c));
        scatter.push_back(std::move(row));
    }
    return json{{"gamma", r.gamma},
                {"subset", r.subset},
                {"scatter", std::move(scatter)},
                {"shape", shape_to_json(r.shape)},
                {"determinant", r.determinant}};
}

// "ratio,corr,depth", row-major over ratio then corr.
inline void save_contour_csv(const std::string& path, const ContourGrid& grid) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write contour file: " + path);
    out << "ratio,corr,depth\n";
    for (std::size_t i = 0; i < grid.ratio_axis.size(); ++i)
        for (std::size_t j = 0; j < grid.corr_axis.size(); ++j)
            out << detail::fmt12(grid.ratio_axis[i]) << "," << detail::fmt12(grid.corr_axis[j]) << ","
                << detail::fmt12(grid.depth(i, j)) << "\n";
}

inline void save_gamma_curve_csv(const std::string& path, const GammaCurve& curve) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write curve file: " + path);
    out << "gamma,depth,subset_size\n";
    for (const auto& e : curve)
        out << detail::fmt12(e.gamma) << "," << detail::fmt12(e.depth.value()) << "," << e.subset_size << "\n";
}

inline void save_sim_table_csv(const std::string& path, const SimTable& table) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write table file: " + path);
    out << "param,frequency,replications\n";
    for (const auto& row : table)
        out << detail::fmt12(row.param) << "," << detail::fmt12(row.frequency) << "," << row.replications << "\n";
}

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw parse_error("cannot write json file: " + path);
    out << j.dump(2) << "\n";
}

// FNV-1a 64-bit digest of a file's bytes, hex-encoded; used to pin inputs in
// run manifests.
inline std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot digest file: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

}  // namespace shapedepth
