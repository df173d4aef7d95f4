// Copyright 2026 The msocc Authors. All Rights Reserved.
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace msocc {

/// Failure categories. The CLI maps them onto process exit codes.
enum class ErrorKind {
  kValidation,  // malformed input, shape mismatch, violated precondition
  kNumerical,   // NaN / non-finite values detected
  kIo,          // file system or tensor-file decoding failure
};

int exit_code_for(ErrorKind kind);
const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail_validation(const std::string& what);
[[noreturn]] void fail_numerical(const std::string& what);

inline void require(bool condition, std::string_view what) {
  if (!condition) fail_validation(std::string(what));
}

}  // namespace msocc
