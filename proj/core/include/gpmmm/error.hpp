// Copyright 2026 The gpmmm Authors
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

#ifndef GPMMM_ERROR_HPP_
#define GPMMM_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace gpmmm {

// Root of every error thrown by the library. The CLI maps Error subclasses
// to exit status 1 (user error) and everything else to 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside an operation's domain (negative spend, bad window, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Cholesky failed even at the largest jitter.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class SamplerError : public Error {
 public:
  using Error::Error;
};

// Every optimization candidate was filtered out.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or config document. Carries a location when known.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::string source = {}, int line = 0,
              int column = 0)
      : Error(Format(what, source, line, column)),
        source_(std::move(source)),
        line_(line),
        column_(column) {}

  const std::string& source() const { return source_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string Format(const std::string& what, const std::string& source,
                            int line, int column) {
    if (source.empty() && line == 0) return what;
    std::string loc = source.empty() ? std::string("<input>") : source;
    if (line > 0) loc += ":" + std::to_string(line);
    if (column > 0) loc += ":" + std::to_string(column);
    return loc + ": " + what;
  }

  std::string source_;
  int line_;
  int column_;
};

}  // namespace gpmmm

#endif  // GPMMM_ERROR_HPP_
