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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prefopt {

/// Violated precondition on a caller-supplied value.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed JSONL record; `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Well-formed record that disagrees with the dataset schema
/// (e.g. a reference missing from one record).
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::size_t record, const std::string& what);
  std::size_t record() const noexcept { return record_; }

 private:
  std::size_t record_;
};

/// Invalid or inconsistent run/sweep/synth configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite intermediate was produced during loss or gradient evaluation.
/// Carries the offending example (empty when not example-specific) and the
/// name of the quantity that went non-finite.
class NumericalFailure : public std::runtime_error {
 public:
  NumericalFailure(std::string example_id, std::string quantity, double value);

  const std::string& example_id() const noexcept { return example_id_; }
  const std::string& quantity() const noexcept { return quantity_; }
  double value() const noexcept { return value_; }

 private:
  std::string example_id_;
  std::string quantity_;
  double value_;
};

}  // namespace prefopt
