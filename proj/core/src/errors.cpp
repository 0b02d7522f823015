// Copyright 2026 The prefopt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prefopt/errors.hpp"

#include <sstream>

namespace prefopt {

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

SchemaError::SchemaError(std::size_t record, const std::string& what)
    : std::runtime_error("record " + std::to_string(record) + ": " + what), record_(record) {}

namespace {

std::string failure_message(const std::string& id, const std::string& quantity, double value) {
  std::ostringstream os;
  os << "non-finite " << quantity << " (" << value << ")";
  if (!id.empty()) os << " at example '" << id << "'";
  return os.str();
}

}  // namespace

NumericalFailure::NumericalFailure(std::string example_id, std::string quantity, double value)
    : std::runtime_error(failure_message(example_id, quantity, value)),
      example_id_(std::move(example_id)),
      quantity_(std::move(quantity)),
      value_(value) {}

}  // namespace prefopt
