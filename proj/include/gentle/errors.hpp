// Copyright 2026 The Gentle Authors
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

#ifndef GENTLE_ERRORS_HPP_
#define GENTLE_ERRORS_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gentle {

// Bad argument or configuration value. The CLI maps this to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. Carries the 1-based line number when known.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : ValidationError(line == 0 ? what
                                  : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Query outside the domain of a schedule or lookup.
class QueryError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& v) {
  return v.allFinite();
}

inline void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw ValidationError(std::string(name) + " is not finite");
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& v, const char* name) {
  if (!v.allFinite()) throw ValidationError(std::string(name) + " has a non-finite component");
}

}  // namespace detail
}  // namespace gentle

#endif  // GENTLE_ERRORS_HPP_
