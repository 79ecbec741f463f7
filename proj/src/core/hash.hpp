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

#ifndef NIFUZZ_CORE_HASH_HPP_
#define NIFUZZ_CORE_HASH_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace nifuzz {

// Stable 128-bit digest (MurmurHash3 x64_128). Used for public inputs and
// outputs, where a collision would silently merge two observations.
struct Hash128 {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  friend constexpr auto operator<=>(const Hash128&, const Hash128&) = default;

  // 32 lowercase hex digits, hi word first.
  std::string hex() const;
  static std::optional<Hash128> from_hex(std::string_view text);
};

Hash128 hash128(std::span<const std::uint8_t> bytes, std::uint64_t seed = 0);

// Combines two digests order-dependently.
Hash128 hash_combine(const Hash128& a, const Hash128& b);

struct Hash128Hasher {
  std::size_t operator()(const Hash128& h) const noexcept {
    return static_cast<std::size_t>(h.lo ^ (h.hi * 0x9e3779b97f4a7c15ULL));
  }
};

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_HASH_HPP_
