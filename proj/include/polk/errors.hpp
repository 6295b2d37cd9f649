/*
 * Copyright 2026 The polk Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POLK_ERRORS_HPP
#define POLK_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate an operation's preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A training configuration that cannot be run (e.g. eta >= 1/lambda).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Model order exceeded a configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace polk

#endif  // POLK_ERRORS_HPP
