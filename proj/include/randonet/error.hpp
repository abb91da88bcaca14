// Copyright 2026 The RandONet Authors.
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

#ifndef RANDONET_ERROR_HPP_
#define RANDONET_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace randonet {

/// Error categories, stable strings are emitted in CLI error records.
enum class ErrorKind {
  kInvalidArgument,
  kShapeMismatch,
  kNonFinite,
  kSolverFailure,
  kIntegrationFailure,
  kBudgetExceeded,
  kIo,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace randonet

#endif  // RANDONET_ERROR_HPP_
