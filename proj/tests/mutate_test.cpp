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

#include <bit>
#include <set>

#include <gtest/gtest.h>

#include "core/mutate.hpp"

namespace nifuzz {
namespace {

StructuredInput full_input() {
  StructuredInput in;
  in.public_part = {1, 2, 3, 4, 5, 6, 7, 8};
  in.explicit_secret = Bytes{10, 11, 12, 13};
  in.stack_secret = Bytes{20, 21};
  in.heap_secret = Bytes{30};
  return in;
}

TEST(MutatePublic, SingleBitFlipLeavesSecretsAlone) {
  Rng rng(1);
  StructuredInput in;
  in.public_part = {0x00};
  in.explicit_secret = Bytes{0x42};
  Bytes pub = in.public_part;
  apply_havoc_op(pub, HavocOp::kFlipBit, rng, {}, 0, nullptr);
  EXPECT_EQ(std::popcount(static_cast<unsigned>(pub[0])), 1);
}

TEST(MutatePublic, OnlyPublicChanges) {
  Rng rng(2);
  const StructuredInput in = full_input();
  for (int i = 0; i < 2000; ++i) {
    const StructuredInput out = mutate_public(in, rng);
    ASSERT_EQ(out.explicit_secret, in.explicit_secret);
    ASSERT_EQ(out.stack_secret, in.stack_secret);
    ASSERT_EQ(out.heap_secret, in.heap_secret);
  }
}

TEST(MutatePublic, EmptyPublicCanGrow) {
  Rng rng(3);
  StructuredInput in;
  in.explicit_secret = Bytes{1};
  bool grew = false;
  for (int i = 0; i < 100 && !grew; ++i) grew = !mutate_public(in, rng).public_part.empty();
  EXPECT_TRUE(grew);
}

TEST(MutatePublic, ProducesVariety) {
  Rng rng(4);
  const StructuredInput in = full_input();
  std::set<Bytes> seen;
  for (int i = 0; i < 10000; ++i) seen.insert(mutate_public(in, rng).public_part);
  EXPECT_GE(seen.size(), 2u);
}

TEST(MutatePublic, RespectsMaxPartSize) {
  Rng rng(5);
  StructuredInput in = full_input();
  MutationContext ctx;
  ctx.max_part_size = 16;
  for (int i = 0; i < 5000; ++i) {
    in = mutate_public(in, rng, ctx);
    ASSERT_LE(in.public_part.size(), 16u);
  }
}

TEST(MutatePublic, SpliceUsesDonors) {
  Rng rng(6);
  std::vector<StructuredInput> pool(1);
  pool[0].public_part = Bytes(32, 0xEE);
  MutationContext ctx;
  ctx.splice_pool = pool;
  Bytes data(32, 0x11);
  bool took = false;
  for (int i = 0; i < 100 && !took; ++i) {
    Bytes d = data;
    apply_havoc_op(d, HavocOp::kSplice, rng, ctx, 0, &pool[0].public_part);
    took = std::find(d.begin(), d.end(), 0xEE) != d.end();
  }
  EXPECT_TRUE(took);
}

TEST(MutateSecret, ProbeVariantSetsPatterns) {
  Rng rng(7);
  StructuredInput in;
  in.stack_secret = Bytes{0x00};
  in.heap_secret = Bytes{0x00};
  const StructuredInput out = mutate_secret(in, rng, SecretVariant::kProbe);
  EXPECT_EQ(*out.stack_secret, Bytes{0xAA});
  EXPECT_EQ(*out.heap_secret, Bytes{0x55});
  const StructuredInput swapped = mutate_secret(in, rng, SecretVariant::kProbeSwapped);
  EXPECT_EQ(*swapped.stack_secret, Bytes{0x55});
  EXPECT_EQ(*swapped.heap_secret, Bytes{0xAA});
}

TEST(MutateSecret, PublicUntouched) {
  Rng rng(8);
  StructuredInput in;
  in.public_part = {7};
  in.explicit_secret = Bytes{1};
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(mutate_secret(in, rng, SecretVariant::kHavoc).public_part, Bytes{7});
  }
}

TEST(MutateSecret, PresencePreserved) {
  Rng rng(9);
  StructuredInput in;
  in.heap_secret = Bytes{3, 4};
  for (SecretVariant v : {SecretVariant::kHavoc, SecretVariant::kProbe, SecretVariant::kProbeSwapped}) {
    for (int i = 0; i < 300; ++i) {
      const StructuredInput out = mutate_secret(in, rng, v);
      ASSERT_FALSE(out.explicit_secret.has_value());
      ASSERT_FALSE(out.stack_secret.has_value());
      ASSERT_TRUE(out.heap_secret.has_value());
      ASSERT_GE(out.heap_secret->size(), 1u);
    }
  }
}

TEST(MutateSecret, HavocKeepsMemoryPartsNonEmpty) {
  Rng rng(10);
  StructuredInput in;
  in.stack_secret = Bytes{1};
  for (int i = 0; i < 3000; ++i) {
    in = mutate_secret(in, rng, SecretVariant::kHavoc);
    ASSERT_GE(in.stack_secret->size(), 1u);
  }
}

TEST(UniformSample, LengthsAndPublicPreserved) {
  Rng rng(11);
  StructuredInput in;
  in.public_part = {9};
  in.explicit_secret = Bytes{0, 0, 0, 0};
  in.stack_secret = Bytes{1, 2};
  const StructuredInput out = uniform_sample_secrets(in, rng);
  EXPECT_EQ(out.public_part, Bytes{9});
  EXPECT_EQ(out.explicit_secret->size(), 4u);
  EXPECT_EQ(out.stack_secret->size(), 2u);
  EXPECT_FALSE(out.heap_secret.has_value());
}

TEST(UniformSample, CoversByteValues) {
  Rng rng(12);
  StructuredInput in;
  in.explicit_secret = Bytes{0};
  std::set<std::uint8_t> values;
  for (int i = 0; i < 65536; ++i) {
    uniform_sample_secrets_in_place(in, rng);
    values.insert((*in.explicit_secret)[0]);
  }
  EXPECT_GE(values.size(), 250u);
}

TEST(UniformSample, BitsAreBalanced) {
  Rng rng(13);
  StructuredInput in;
  in.explicit_secret = Bytes(8, 0);
  std::array<int, 64> ones{};
  constexpr int kRuns = 20000;
  for (int i = 0; i < kRuns; ++i) {
    uniform_sample_secrets_in_place(in, rng);
    for (int b = 0; b < 64; ++b) ones[b] += test_bit(*in.explicit_secret, b);
  }
  // 5 sigma of Binomial(20000, 1/2) is about 354.
  for (int b = 0; b < 64; ++b) EXPECT_NEAR(ones[b], kRuns / 2, 354) << "bit " << b;
}

}  // namespace
}  // namespace nifuzz
