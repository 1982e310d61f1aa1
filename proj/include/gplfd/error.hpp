// Copyright 2026 The gplfd Authors
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

#ifndef GPLFD_ERROR_HPP_
#define GPLFD_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gplfd {

// Mirrors gplfd_status in the C API; values must stay in sync.
enum class ErrorCode {
  kInvalidInput = 1,
  kNumericalConditioning = 2,
  kState = 3,
  kOptimizationFailure = 4,
  kDegenerateTrajectory = 5,
  kInsufficientData = 6,
  kInconsistentConstraint = 7,
  kDivergence = 8,
  kParse = 9,
  kFormat = 10,
  kIo = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::kParse, "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error(ErrorCode::kDivergence,
              what + " (first non-finite step " + std::to_string(step) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace gplfd

#endif  // GPLFD_ERROR_HPP_
