// Copyright 2026 The qiter Authors
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

#include "qiter/linalg.hpp"

namespace qiter {

// Matrix literal: array of rows, each an array of [re, im] pairs. A bare
// number is accepted as a real entry. Throws qiter::Error on bad shape.
ComplexMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const ComplexMatrix& m);

// Partition: [["A", 1], ["U", 2]] or {"names": [...], "sizes": [...]}. A
// bare name in the array form is a block of size 1.
Partition partition_from_json(const nlohmann::json& j);
nlohmann::json partition_to_json(const Partition& p);

// Serialises with every floating point value printed as %.17g. Output is
// byte-stable for equal inputs.
std::string dump_json(const nlohmann::json& j, int indent = 2);
std::string format_double(double x);

}  // namespace qiter
