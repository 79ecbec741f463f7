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

#include "core/mutate.hpp"

#include <algorithm>
#include <array>

namespace nifuzz {
namespace {

constexpr std::array<std::int8_t, 9> kInteresting8 = {-128, -1, 0, 1, 16, 32, 64, 100, 127};
constexpr std::array<std::int16_t, 10> kInteresting16 = {-32768, -129, 128,  255,  256,
                                                         512,    1000, 1024, 4096, 32767};
constexpr std::array<std::int32_t, 8> kInteresting32 = {
    -2147483647 - 1, -100663046, -32769, 32768, 65535, 65536, 100663045, 2147483647};

constexpr std::size_t kSmallBlock = 32;
constexpr std::size_t kMediumBlock = 128;
constexpr std::size_t kLargeBlock = 1500;

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// AFL-style tiers: 1-32, 32-128, 128-1500 bytes.
std::size_t block_len(Rng& rng, std::size_t limit) {
  if (limit == 0) return 0;
  std::size_t lo = 1;
  std::size_t hi = kSmallBlock;
  switch (pick(rng, 3)) {
    case 0:
      break;
    case 1:
      lo = kSmallBlock;
      hi = kMediumBlock;
      break;
    default:
      lo = kMediumBlock;
      hi = kLargeBlock;
  }
  if (lo >= limit) lo = 1;
  return lo + pick(rng, std::min(hi, limit) - lo + 1);
}

void store_int(Bytes& data, std::size_t pos, std::uint64_t value, std::size_t width,
               bool big_endian) {
  for (std::size_t i = 0; i < width; ++i) {
    const std::size_t shift = big_endian ? 8 * (width - 1 - i) : 8 * i;
    data[pos + i] = static_cast<std::uint8_t>(value >> shift);
  }
}

void set_interesting(Bytes& data, std::size_t width, Rng& rng) {
  if (data.size() < width) return;
  std::int64_t value = 0;
  // Wider slots may also receive narrower interesting values.
  const std::size_t pool = kInteresting8.size() +
                           (width >= 2 ? kInteresting16.size() : 0) +
                           (width >= 4 ? kInteresting32.size() : 0);
  std::size_t idx = pick(rng, pool);
  if (idx < kInteresting8.size()) {
    value = kInteresting8[idx];
  } else if ((idx -= kInteresting8.size()) < kInteresting16.size()) {
    value = kInteresting16[idx];
  } else {
    value = kInteresting32[idx - kInteresting16.size()];
  }
  const std::size_t pos = pick(rng, data.size() - width + 1);
  store_int(data, pos, static_cast<std::uint64_t>(value), width, rng() & 1);
}

}  // namespace

void apply_havoc_op(Bytes& data, HavocOp op, Rng& rng, const MutationContext& ctx,
                    std::size_t min_size, const Bytes* splice_donor) {
  const std::size_t max_size = std::max(ctx.max_part_size, min_size);
  const bool needs_content = op != HavocOp::kInsertBlock && op != HavocOp::kSplice;
  if (data.empty() && needs_content) op = HavocOp::kInsertBlock;

  switch (op) {
    case HavocOp::kFlipBit: {
      const std::size_t bit = pick(rng, data.size() * 8);
      data[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      break;
    }
    case HavocOp::kRandomByte:
      // XOR with a non-zero value so the byte always changes.
      data[pick(rng, data.size())] ^= static_cast<std::uint8_t>(1 + pick(rng, 255));
      break;
    case HavocOp::kInteresting8:
      set_interesting(data, 1, rng);
      break;
    case HavocOp::kInteresting16:
      set_interesting(data, 2, rng);
      break;
    case HavocOp::kInteresting32:
      set_interesting(data, 4, rng);
      break;
    case HavocOp::kArith8: {
      const auto delta = static_cast<std::uint8_t>(1 + pick(rng, 35));
      auto& b = data[pick(rng, data.size())];
      b = static_cast<std::uint8_t>((rng() & 1) ? b + delta : b - delta);
      break;
    }
    case HavocOp::kDeleteBlock: {
      if (data.size() <= min_size) break;
      const std::size_t len = block_len(rng, data.size() - min_size);
      const std::size_t pos = pick(rng, data.size() - len + 1);
      data.erase(data.begin() + static_cast<std::ptrdiff_t>(pos),
                 data.begin() + static_cast<std::ptrdiff_t>(pos + len));
      break;
    }
    case HavocOp::kInsertBlock: {
      if (data.size() >= max_size) break;
      const std::size_t len = block_len(rng, max_size - data.size());
      const std::size_t pos = pick(rng, data.size() + 1);
      Bytes block(len);
      if (rng() & 1) {
        fill_uniform(block, rng);
      } else {
        std::fill(block.begin(), block.end(), static_cast<std::uint8_t>(rng()));
      }
      data.insert(data.begin() + static_cast<std::ptrdiff_t>(pos), block.begin(), block.end());
      break;
    }
    case HavocOp::kDuplicateBlock: {
      if (data.size() >= max_size) break;
      const std::size_t len = block_len(rng, std::min(data.size(), max_size - data.size()));
      const std::size_t from = pick(rng, data.size() - len + 1);
      const std::size_t to = pick(rng, data.size() + 1);
      const Bytes block(data.begin() + static_cast<std::ptrdiff_t>(from),
                        data.begin() + static_cast<std::ptrdiff_t>(from + len));
      data.insert(data.begin() + static_cast<std::ptrdiff_t>(to), block.begin(), block.end());
      break;
    }
    case HavocOp::kOverwriteBlock: {
      if (data.size() < 2) break;
      const std::size_t len = block_len(rng, data.size() - 1);
      const std::size_t from = pick(rng, data.size() - len + 1);
      const std::size_t to = pick(rng, data.size() - len + 1);
      std::copy_n(Bytes(data.begin() + static_cast<std::ptrdiff_t>(from),
                        data.begin() + static_cast<std::ptrdiff_t>(from + len))
                      .begin(),
                  len, data.begin() + static_cast<std::ptrdiff_t>(to));
      break;
    }
    case HavocOp::kSplice: {
      if (splice_donor == nullptr || splice_donor->empty()) {
        apply_havoc_op(data, HavocOp::kInsertBlock, rng, ctx, min_size, nullptr);
        break;
      }
      // Keep a prefix of ours, continue with a suffix of the donor.
      const std::size_t cut_ours = pick(rng, data.size() + 1);
      const std::size_t cut_donor = pick(rng, splice_donor->size());
      Bytes spliced(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(cut_ours));
      spliced.insert(spliced.end(),
                     splice_donor->begin() + static_cast<std::ptrdiff_t>(cut_donor),
                     splice_donor->end());
      if (spliced.size() > max_size) spliced.resize(max_size);
      if (spliced.size() < min_size) break;
      data = std::move(spliced);
      break;
    }
  }
}

void havoc(Bytes& data, Rng& rng, const MutationContext& ctx, std::size_t min_size,
           const Bytes* splice_donor) {
  const int depth = 1 << pick(rng, 4);
  for (int i = 0; i < depth; ++i) {
    const auto op = static_cast<HavocOp>(pick(rng, kHavocOpCount));
    apply_havoc_op(data, op, rng, ctx, min_size, splice_donor);
  }
}

namespace {

const Bytes* pick_donor(Rng& rng, const MutationContext& ctx,
                        const std::optional<Bytes> StructuredInput::*member) {
  if (ctx.splice_pool.empty()) return nullptr;
  const auto& donor = ctx.splice_pool[pick(rng, ctx.splice_pool.size())].*member;
  return donor ? &*donor : nullptr;
}

}  // namespace

StructuredInput mutate_public(const StructuredInput& input, Rng& rng,
                              const MutationContext& ctx) {
  StructuredInput out = input;
  const Bytes* donor = nullptr;
  if (!ctx.splice_pool.empty()) {
    donor = &ctx.splice_pool[pick(rng, ctx.splice_pool.size())].public_part;
  }
  havoc(out.public_part, rng, ctx, 0, donor);
  return out;
}

StructuredInput mutate_secret(const StructuredInput& input, Rng& rng, SecretVariant variant,
                              const MutationContext& ctx) {
  StructuredInput out = input;
  if (out.explicit_secret) {
    havoc(*out.explicit_secret, rng, ctx, 0,
          pick_donor(rng, ctx, &StructuredInput::explicit_secret));
  }
  switch (variant) {
    case SecretVariant::kProbe:
      if (out.stack_secret) out.stack_secret = Bytes{kStackProbePattern};
      if (out.heap_secret) out.heap_secret = Bytes{kHeapProbePattern};
      break;
    case SecretVariant::kProbeSwapped:
      if (out.stack_secret) out.stack_secret = Bytes{kHeapProbePattern};
      if (out.heap_secret) out.heap_secret = Bytes{kStackProbePattern};
      break;
    case SecretVariant::kHavoc:
      if (out.stack_secret) {
        havoc(*out.stack_secret, rng, ctx, 1,
              pick_donor(rng, ctx, &StructuredInput::stack_secret));
      }
      if (out.heap_secret) {
        havoc(*out.heap_secret, rng, ctx, 1,
              pick_donor(rng, ctx, &StructuredInput::heap_secret));
      }
      break;
  }
  return out;
}

void fill_uniform(std::span<std::uint8_t> bytes, Rng& rng) {
  std::size_t i = 0;
  for (; i + 8 <= bytes.size(); i += 8) {
    std::uint64_t word = rng();
    for (int k = 0; k < 8; ++k) bytes[i + k] = static_cast<std::uint8_t>(word >> (8 * k));
  }
  if (i < bytes.size()) {
    std::uint64_t word = rng();
    for (; i < bytes.size(); ++i, word >>= 8) bytes[i] = static_cast<std::uint8_t>(word);
  }
}

void uniform_sample_secrets_in_place(StructuredInput& input, Rng& rng) {
  for (SecretPartId p : kAllSecretParts) {
    if (auto& part = input.secret(p)) fill_uniform(*part, rng);
  }
}

StructuredInput uniform_sample_secrets(const StructuredInput& input, Rng& rng) {
  StructuredInput out = input;
  uniform_sample_secrets_in_place(out, rng);
  return out;
}

}  // namespace nifuzz
