// Copyright 2026 The nifuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NIFUZZ_CORE_ERRORS_HPP_
#define NIFUZZ_CORE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nifuzz {

// Bad campaign configuration (unknown target, missing path, bad flags).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The system under test could not be started. Aborts the campaign.
class TargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A malformed container file or snapshot.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An operation was called on an input lacking the part it needs.
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The resident-set budget was exceeded.
class MemoryBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_ERRORS_HPP_
