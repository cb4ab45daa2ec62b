// Copyright 2026 The dppci Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "dppci/core.hpp"

#include "json.hpp"

#include <string>
#include <string_view>

namespace dppci::io {

enum class MatrixFormat { Auto, Csv, Json };

/// Plain numeric rows; entries separated by commas and/or whitespace.
MatrixXd parse_csv(std::string_view text);

/// {"n": int, "rows": [[...], ...]}
MatrixXd parse_json(std::string_view text);

/// Auto picks JSON for a ".json" path or text starting with '{'.
MatrixXd parse_matrix(std::string_view text, MatrixFormat format, std::string_view path = {});

/// Throws FileNotFound or ParseError.
MatrixXd read_matrix_file(const std::string& path, MatrixFormat format = MatrixFormat::Auto);

/// Serializes with every floating-point value printed to 17 significant
/// digits. Key order follows insertion.
std::string dump_json(const nlohmann::ordered_json& value, int indent = 2);

}  // namespace dppci::io
