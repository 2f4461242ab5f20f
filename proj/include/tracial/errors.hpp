// Copyright 2026 The tracial Authors
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

namespace tracial {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (bad files, shape mismatches,
/// violated preconditions). Maps to exit code 2 at the C boundary.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Sentence text that does not conform to the grammar.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t offset, std::size_t line,
             std::size_t column)
      : ValidationError(what + " at offset " + std::to_string(offset) +
                        " (line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ")"),
        offset_(offset),
        line_(line),
        column_(column) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t offset_;
  std::size_t line_;
  std::size_t column_;
};

/// A numerical procedure could not meet its contract (failed rounding,
/// tolerance violated). Maps to exit code 3 at the C boundary.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracial
