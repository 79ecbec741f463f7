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

// Mutation operators for the explore and exploit stages. Every operator
// returns a fresh input and touches only the parts its contract names.

#ifndef NIFUZZ_CORE_MUTATE_HPP_
#define NIFUZZ_CORE_MUTATE_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "core/input.hpp"

namespace nifuzz {

using Rng = std::mt19937_64;

inline constexpr std::uint8_t kStackProbePattern = 0b10101010;
inline constexpr std::uint8_t kHeapProbePattern = 0b01010101;

enum class HavocOp : std::uint8_t {
  kFlipBit,
  kRandomByte,
  kInteresting8,
  kInteresting16,
  kInteresting32,
  kArith8,
  kDeleteBlock,
  kInsertBlock,
  kDuplicateBlock,
  kOverwriteBlock,
  kSplice,
};
inline constexpr int kHavocOpCount = 11;

struct MutationContext {
  std::size_t max_part_size = kDefaultMaxPartSize;
  // Entries available as splice donors; may be empty.
  std::span<const StructuredInput> splice_pool;
};

// Applies a single havoc operator. Length-changing operators respect
// [min_size, ctx.max_part_size]; operators that need a non-empty buffer fall
// back to insertion on an empty one.
void apply_havoc_op(Bytes& data, HavocOp op, Rng& rng, const MutationContext& ctx,
                    std::size_t min_size, const Bytes* splice_donor);

// 1-8 stacked operators, stack depth drawn log-uniformly.
void havoc(Bytes& data, Rng& rng, const MutationContext& ctx, std::size_t min_size,
           const Bytes* splice_donor);

StructuredInput mutate_public(const StructuredInput& input, Rng& rng,
                              const MutationContext& ctx = {});

enum class SecretVariant : std::uint8_t {
  kHavoc,
  // stack := [0b10101010], heap := [0b01010101]
  kProbe,
  // The opposite assignment, so each region sees both patterns.
  kProbeSwapped,
};

StructuredInput mutate_secret(const StructuredInput& input, Rng& rng,
                              SecretVariant variant, const MutationContext& ctx = {});

// Replaces every byte of every present secret part with an independent
// uniform byte. Lengths, presence and the public part are unchanged.
StructuredInput uniform_sample_secrets(const StructuredInput& input, Rng& rng);
void uniform_sample_secrets_in_place(StructuredInput& input, Rng& rng);

void fill_uniform(std::span<std::uint8_t> bytes, Rng& rng);

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_MUTATE_HPP_
