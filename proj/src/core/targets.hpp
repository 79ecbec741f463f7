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

// Registry of in-process targets. Ships a benchmark corpus of small programs
// with known leaks (and a few that do not leak) and accepts user targets.

#ifndef NIFUZZ_CORE_TARGETS_HPP_
#define NIFUZZ_CORE_TARGETS_HPP_

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/executor.hpp"
#include "core/input.hpp"

namespace nifuzz {

struct TargetInfo {
  std::string name;
  std::string summary;
  // Secret parts the target reads; the campaign default when --parts is
  // not given.
  PartSet parts;
  // Fresh instance per backend, so stateful targets start clean.
  std::function<InProcessFn()> make;
};

// Built-in and user-registered targets, in registration order.
std::vector<TargetInfo> list_targets();
std::optional<TargetInfo> find_target(std::string_view name);

// Replaces any existing target of the same name.
void register_target(TargetInfo info);

// Reads up to four bytes little-endian, missing bytes count as zero.
std::uint32_t read_u32_le(std::span<const std::uint8_t> bytes);

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_TARGETS_HPP_
