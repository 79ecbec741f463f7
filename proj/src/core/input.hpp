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

// The structured fuzzing input: one public part and up to three secret
// parts (explicit secret, stack memory, heap memory), plus the on-disk
// container format.
//
// Container layout (all integers little-endian):
//   "NIFZ" | version 0x01 | presence mask (bit0 explicit, bit1 stack,
//   bit2 heap) | u32 len + public | [u32 len + explicit] | [u32 len + stack]
//   | [u32 len + heap]
//
// Bit numbering: bit i of a part is bit (i % 8) of byte (i / 8), bit 0
// being the least significant.

#ifndef NIFUZZ_CORE_INPUT_HPP_
#define NIFUZZ_CORE_INPUT_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/hash.hpp"

namespace nifuzz {

using Bytes = std::vector<std::uint8_t>;

enum class SecretPartId : std::uint8_t { kExplicit = 0, kStack = 1, kHeap = 2 };

inline constexpr std::array<SecretPartId, 3> kAllSecretParts = {
    SecretPartId::kExplicit, SecretPartId::kStack, SecretPartId::kHeap};

std::string_view part_name(SecretPartId part);
std::optional<SecretPartId> part_from_name(std::string_view name);

// Default cap on any single part, configurable per campaign.
inline constexpr std::size_t kDefaultMaxPartSize = std::size_t{1} << 20;

// Which secret parts a campaign declares. Every input in a campaign carries
// exactly these parts.
class PartSet {
 public:
  constexpr PartSet() = default;
  constexpr explicit PartSet(std::uint8_t mask) : mask_(mask & 0x7) {}

  static PartSet parse(std::string_view comma_list);  // "explicit,stack"

  constexpr bool contains(SecretPartId p) const {
    return (mask_ >> static_cast<unsigned>(p)) & 1;
  }
  constexpr void insert(SecretPartId p) {
    mask_ |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(p));
  }
  constexpr std::uint8_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  std::string to_string() const;

  friend constexpr bool operator==(PartSet, PartSet) = default;

 private:
  std::uint8_t mask_ = 0;
};

struct BitCoordinate {
  SecretPartId part = SecretPartId::kExplicit;
  std::size_t bit_index = 0;

  friend constexpr auto operator<=>(const BitCoordinate&,
                                    const BitCoordinate&) = default;
};

struct StructuredInput {
  Bytes public_part;
  std::optional<Bytes> explicit_secret;
  std::optional<Bytes> stack_secret;
  std::optional<Bytes> heap_secret;

  std::optional<Bytes>& secret(SecretPartId part);
  const std::optional<Bytes>& secret(SecretPartId part) const;

  PartSet present_parts() const;

  friend bool operator==(const StructuredInput&,
                         const StructuredInput&) = default;
};

// Container encoding. deserialize throws FormatError on malformed data.
Bytes serialize(const StructuredInput& input);
StructuredInput deserialize(std::span<const std::uint8_t> data);

StructuredInput read_input_file(const std::string& path);
void write_input_file(const std::string& path, const StructuredInput& input);

// Returns a copy with exactly one bit inverted. Throws std::out_of_range when
// the coordinate does not address a bit of a present part.
StructuredInput flip_bit(const StructuredInput& input, BitCoordinate coord);
void flip_bit_in_place(StructuredInput& input, BitCoordinate coord);

// Tiles the part's current bytes until it holds ceil(new_bit_length / 8)
// bytes. Throws PreconditionError for an absent part or a shrinking length.
StructuredInput extend_secret_part(const StructuredInput& input,
                                   SecretPartId part,
                                   std::size_t new_bit_length);

Hash128 public_hash(const StructuredInput& input);
Hash128 public_hash(std::span<const std::uint8_t> public_bytes);
Hash128 secret_hash(const StructuredInput& input);

inline bool test_bit(std::span<const std::uint8_t> bytes, std::size_t bit) {
  return (bytes[bit / 8] >> (bit % 8)) & 1;
}

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_INPUT_HPP_
