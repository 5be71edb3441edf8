// Copyright 2026 The SSG Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace ssg {

/// Failure categories surfaced by the library and the command-line tool.
enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  io,
  format,
  checksum,
  numeric,
  convergence,
  config,
};

const char* to_string(ErrorCode code);

/// Exception carrying a category and, for I/O-style failures, the path involved.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string path = {})
      : std::runtime_error(message), code_(code), path_(std::move(path)) {}

  ErrorCode code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  ErrorCode code_;
  std::string path_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message,
                              std::string path = {}) {
  throw Error(code, message, std::move(path));
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::invalid_argument, message);
}

}  // namespace ssg
