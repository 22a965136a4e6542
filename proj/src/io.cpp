// Copyright 2026 The asymforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "asymforge/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace asymforge::io {

namespace {

double finite_number(const nlohmann::json& v, Eigen::Index row, Eigen::Index col) {
    if (!v.is_number()) {
        throw Error(ErrorCode::ParseError,
                    "entry (" + std::to_string(row) + ", " + std::to_string(col) + ") is not a number pair");
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::ParseError,
                    "entry (" + std::to_string(row) + ", " + std::to_string(col) + ") is not finite");
    }
    return x;
}

}  // namespace

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "expected a JSON object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) {
        throw Error(ErrorCode::ParseError, "missing integer field \"dim\"");
    }
    if (!j.contains("matrix") || !j["matrix"].is_array()) {
        throw Error(ErrorCode::ParseError, "missing array field \"matrix\"");
    }
    const auto dim = j["dim"].get<long long>();
    if (dim < 1) throw Error(ErrorCode::ParseError, "\"dim\" must be positive");
    const auto& rows = j["matrix"];
    if (static_cast<long long>(rows.size()) != dim) {
        throw Error(ErrorCode::ParseError,
                    "matrix has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(dim));
    }
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = rows[r];
        if (!row.is_array() || static_cast<long long>(row.size()) != dim) {
            throw Error(ErrorCode::ParseError, "ragged row " + std::to_string(r) + ": expected " +
                                                   std::to_string(dim) + " entries");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            const auto& e = row[c];
            if (!e.is_array() || e.size() != 2) {
                throw Error(ErrorCode::ParseError, "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                                       ") must be a [re, im] pair");
            }
            m(r, c) = Complex(finite_number(e[0], r, c), finite_number(e[1], r, c));
        }
    }
    return m;
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return {{"dim", m.rows()}, {"matrix", std::move(rows)}};
}

ComplexMatrix parse_matrix(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return matrix_from_json(j);
}

ComplexMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_matrix(buf.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.detail());
    }
}

void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
    out << matrix_to_json(m).dump() << '\n';
}

}  // namespace asymforge::io
