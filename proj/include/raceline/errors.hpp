// Copyright 2026 The Raceline Authors
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

#ifndef RACELINE_ERRORS_HPP
#define RACELINE_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace raceline {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An offset vector leaves the lateral box [-w_T/2, w_T/2].
class BoundsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Malformed input file. `line()` is 1-based; 0 means "not line specific".
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Numerical failure: factorization breakdown, infeasible speed profile, etc.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InfeasibleStartError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegeneratePathError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InitializationError : public Error {
 public:
  using Error::Error;
};

}  // namespace raceline

#endif  // RACELINE_ERRORS_HPP
