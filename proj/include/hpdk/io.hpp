#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpd_core.hpp"

namespace hpdk {

using json = nlohmann::json;

// {"dim": N, "field": "real"|"complex", "entries": rows}; complex entries are [re, im].
inline json matrix_to_json(const HpdMatrix& x) {
    const int n = x.dim();
    json rows = json::array();
    for (int i = 0; i < n; ++i) {
        json row = json::array();
        for (int j = 0; j < n; ++j) {
            const cd v = x.matrix()(i, j);
            if (x.is_real())
                row.push_back(v.real());
            else
                row.push_back(json::array({v.real(), v.imag()}));
        }
        rows.push_back(std::move(row));
    }
    return json{{"dim", n}, {"field", x.is_real() ? "real" : "complex"}, {"entries", rows}};
}

inline HpdMatrix matrix_from_json(const json& j, double tol = kHermitianTol) {
    try {
        const int n = j.at("dim").get<int>();
        const std::string field = j.value("field", "real");
        require(field == "real" || field == "complex", ErrorKind::Io, "unknown field " + field);
        const json& e = j.at("entries");
        require(e.is_array() && static_cast<int>(e.size()) == n, ErrorKind::DimensionMismatch,
                "entries do not match dim");
        CMatrix a(n, n);
        for (int r = 0; r < n; ++r) {
            require(e[r].is_array() && static_cast<int>(e[r].size()) == n, ErrorKind::DimensionMismatch,
                    "row length does not match dim");
            for (int c = 0; c < n; ++c) {
                const json& v = e[r][c];
                if (v.is_array())
                    a(r, c) = cd(v.at(0).get<double>(), v.at(1).get<double>());
                else
                    a(r, c) = cd(v.get<double>(), 0.0);
            }
        }
        return HpdMatrix::validate(a, tol);
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::Io, std::string("malformed matrix json: ") + ex.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& ex) {
        throw Error(ErrorKind::Io, path + ": " + ex.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
    out << text;
}

inline HpdMatrix read_matrix_file(const std::string& path) { return matrix_from_json(read_json_file(path)); }

// A sample set is a JSON array of matrices; a single matrix object is accepted too.
inline std::vector<HpdMatrix> samples_from_json(const json& j) {
    std::vector<HpdMatrix> out;
    if (j.is_object()) {
        out.push_back(matrix_from_json(j));
        return out;
    }
    require(j.is_array(), ErrorKind::Io, "sample set must be a JSON array");
    for (const auto& m : j) out.push_back(matrix_from_json(m));
    if (!out.empty())
        for (const auto& m : out) require_same_dim(m.dim(), out.front().dim());
    return out;
}

inline json samples_to_json(const std::vector<HpdMatrix>& xs) {
    json a = json::array();
    for (const auto& x : xs) a.push_back(matrix_to_json(x));
    return a;
}

inline std::vector<HpdMatrix> read_samples_file(const std::string& path) {
    return samples_from_json(read_json_file(path));
}

}  // namespace hpdk
