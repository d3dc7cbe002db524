// Copyright 2026 The mfdim Authors
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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfdim {

// Numeric values double as CLI exit codes (integrity maps to 1 there).
enum class ErrorCode : int {
  kDomain = 1,
  kUsage = 2,
  kInfeasible = 3,
  kDepthExceeded = 4,
  kIntegrity = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct DomainError : Error {
  explicit DomainError(const std::string& what) : Error(ErrorCode::kDomain, what) {}
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorCode::kUsage, what) {}
};

struct InfeasibleError : Error {
  explicit InfeasibleError(const std::string& what)
      : Error(ErrorCode::kInfeasible, what) {}
};

struct DepthExceededError : Error {
  explicit DepthExceededError(const std::string& what)
      : Error(ErrorCode::kDepthExceeded, what) {}
};

struct IntegrityError : Error {
  explicit IntegrityError(const std::string& what)
      : Error(ErrorCode::kIntegrity, what) {}
};

// Raised when a schedule entry would pass the order cap. Carries the last
// entry that still fits.
class CappedScheduleError : public DepthExceededError {
 public:
  CappedScheduleError(const std::string& what, std::uint64_t last_entry)
      : DepthExceededError(what), last_entry_(last_entry) {}
  std::uint64_t last_entry() const noexcept { return last_entry_; }

 private:
  std::uint64_t last_entry_;
};

}  // namespace mfdim
