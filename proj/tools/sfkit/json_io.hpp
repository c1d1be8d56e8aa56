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

#pragma once

#include <string>

#include <json.hpp>

#include "sfkit/linalg.hpp"

namespace sfkit::cli {

using Json = nlohmann::json;

/// Nested row-major arrays.
Json to_json(const Matrix& m);
Json to_json(const Vector& v);

/// `where` names the offending field in error messages.
Matrix matrix_from_json(const Json& j, const std::string& where);
Vector vector_from_json(const Json& j, const std::string& where);
/// List of vectors [[...], [...]] -> matrix whose columns are the vectors.
Matrix columns_from_json(const Json& j, int ambient_dim, const std::string& where);

const Json& require_field(const Json& object, const std::string& key, const std::string& where);
double number_field(const Json& object, const std::string& key, const std::string& where);
int integer_field(const Json& object, const std::string& key, const std::string& where);

/// Finite doubles stay numbers; infinities and NaN become null.
Json number(double v);

}  // namespace sfkit::cli
