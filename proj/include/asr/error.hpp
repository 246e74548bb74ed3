/*
 * Copyright 2026 The ASR Authors
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

#ifndef ASR_ERROR_HPP_
#define ASR_ERROR_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. `position()` is a 1-based line number for triple and
/// checkpoint files, and a 0-based byte offset for clause text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownSymbolError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when a closed-form maximum violation is requested for a clause
/// shape that has none; callers fall back to the iterative adversary.
class UnsupportedTemplateError : public Error {
 public:
  using Error::Error;
};

}  // namespace asr

#endif  // ASR_ERROR_HPP_
