// Copyright 2026 The sfkit Authors
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

#include "sfkit/json_io.hpp"

#include <cmath>

#include "sfkit/errors.hpp"

namespace sfkit::cli {

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Matrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) throw InputError(where + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(where + ": row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& x = row[static_cast<std::size_t>(c)];
      if (!x.is_number()) {
        throw InputError(where + "[" + std::to_string(i) + "][" + std::to_string(c) + "]: expected a number");
      }
      m(i, c) = x.get<double>();
    }
  }
  require_finite(m, where);
  return m;
}

Vector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError(where + "[" + std::to_string(i) + "]: expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  require_finite(v, where);
  return v;
}

Matrix columns_from_json(const Json& j, int ambient_dim, const std::string& where) {
  if (!j.is_array()) throw InputError(where + ": expected a list of vectors");
  Matrix out(ambient_dim, static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    const Vector v = vector_from_json(j[k], where + "[" + std::to_string(k) + "]");
    if (v.size() != ambient_dim) {
      throw InputError(where + "[" + std::to_string(k) + "]: expected length " + std::to_string(ambient_dim));
    }
    out.col(static_cast<Eigen::Index>(k)) = v;
  }
  return out;
}

const Json& require_field(const Json& object, const std::string& key, const std::string& where) {
  if (!object.is_object()) throw InputError(where + ": expected an object");
  const auto it = object.find(key);
  if (it == object.end()) throw InputError(where + ": missing required field '" + key + "'");
  return *it;
}

double number_field(const Json& object, const std::string& key, const std::string& where) {
  const Json& v = require_field(object, key, where);
  if (!v.is_number()) throw InputError(where + "." + key + ": expected a number");
  return v.get<double>();
}

int integer_field(const Json& object, const std::string& key, const std::string& where) {
  const Json& v = require_field(object, key, where);
  if (!v.is_number_integer()) throw InputError(where + "." + key + ": expected an integer");
  return v.get<int>();
}

}  // namespace sfkit::cli
