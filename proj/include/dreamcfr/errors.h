// Copyright 2026 The dreamcfr Authors.
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

#ifndef DREAMCFR_ERRORS_H_
#define DREAMCFR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dreamcfr {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidStateError : public Error {
 public:
  using Error::Error;
};

class IllegalActionError : public Error {
 public:
  using Error::Error;
};

// An operation was applied to a node of the wrong kind (e.g. asking a chance
// node for its legal actions).
class WrongNodeError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

// The requested computation would require enumerating a game that is too
// large (exact best response on flop hold'em).
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Network outputs or losses became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigParseError : public Error {
 public:
  ConfigParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ConfigValidationError : public Error {
 public:
  ConfigValidationError(std::string key, const std::string& what)
      : Error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace dreamcfr

#endif  // DREAMCFR_ERRORS_H_
