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


#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/explore.hpp"
#include "core/targets.hpp"

namespace nifuzz {
namespace {

InProcessBackend backend_for(const std::string& name) {
  return InProcessBackend(find_target(name)->make(), name);
}

StructuredInput explicit_seed(Bytes pub, Bytes secret) {
  StructuredInput in;
  in.public_part = std::move(pub);
  in.explicit_secret = std::move(secret);
  return in;
}

TEST(Explore, StepsTwoAndThreeChangeOnlyTheirPart) {
  auto backend = backend_for("target-func");
  FuzzerState state;
  state.add_to_corpus(explicit_seed({0, 0}, {0, 0}));
  Rng rng(1);
  int checked = 0;
  ExploreOptions opts;
  opts.observer = [&](ExploreStep step, const StructuredInput& base, const StructuredInput& in) {
    if (step == ExploreStep::kPublicOnly) {
      ASSERT_EQ(in.explicit_secret, base.explicit_secret);
      ++checked;
    } else if (step == ExploreStep::kSecretOnly) {
      ASSERT_EQ(in.public_part, base.public_part);
      ++checked;
    }
  };
  for (int i = 0; i < 2000; ++i) explore_round(state, backend, rng, opts);
  EXPECT_EQ(checked, 4000);
}

TEST(Explore, ExecutionCountIncludesConfirmation) {
  auto backend = backend_for("constant");
  FuzzerState state;
  state.add_to_corpus(explicit_seed({0}, {0}));
  Rng rng(2);
  const ExploreRoundReport r = explore_round(state, backend, rng);
  EXPECT_EQ(r.executions, 3u);
  EXPECT_EQ(backend.executions(), 3u);
}

TEST(Explore, PublicOnlyStepReachesGuardedBranch) {
  auto backend = backend_for("branchy");
  FuzzerState state;
  state.add_to_corpus(explicit_seed({0}, {1}));
  Rng rng(3);
  bool reached = false;
  ExploreOptions opts;
  opts.observer = [&](ExploreStep step, const StructuredInput& base, const StructuredInput& in) {
    if (step == ExploreStep::kPublicOnly && base.explicit_secret == Bytes{1} &&
        !in.public_part.empty() && in.public_part[0] >= 3) {
      reached = true;
    }
  };
  for (int i = 0; i < 200 && !reached; ++i) explore_round(state, backend, rng, 0, opts);
  EXPECT_TRUE(reached);
}

TEST(Explore, BranchyLeakBecomesViolation) {
  auto backend = backend_for("branchy");
  FuzzerState state;
  state.add_to_corpus(explicit_seed({0}, {1}));
  Rng rng(4);
  for (int i = 0; i < 20000 && state.violations.empty(); ++i) explore_round(state, backend, rng);
  ASSERT_FALSE(state.violations.empty());
  const Violation& v = state.violations[0];
  EXPECT_EQ(v.witness_a.public_part, v.witness_b.public_part);
  EXPECT_NE(backend.run(v.witness_a).output, backend.run(v.witness_b).output);
  EXPECT_TRUE(state.check_invariants().empty());
}

TEST(Explore, PaddingLeakFoundByProbePatterns) {
  auto backend = backend_for("padding-leak");
  FuzzerState state;
  StructuredInput seed;
  seed.public_part = Bytes(4, 0);
  seed.stack_secret = Bytes(16, 0);
  state.add_to_corpus(seed);
  state.record_execution(seed, backend.run(seed), Phase::kNonUniform);
  Rng rng(5);
  // The probe step keeps the seed's public part, so the first round pairs
  // 0xAA-painted padding with the zero-painted seed.
  const ExploreRoundReport first = explore_round(state, backend, rng, 0);
  EXPECT_EQ(first.new_violations, 1u);
  ASSERT_EQ(state.violations.size(), 1u);
  const Violation& v = state.violations[0];
  const Bytes a = backend.run(v.witness_a).output.stdout_bytes;
  const Bytes b = backend.run(v.witness_b).output.stdout_bytes;
  EXPECT_NE(Bytes(a.begin() + 12, a.begin() + 16), Bytes(b.begin() + 12, b.begin() + 16));
}

TEST(Explore, ConstantTargetNeverViolates) {
  auto backend = backend_for("constant");
  FuzzerState state;
  state.add_to_corpus(explicit_seed(Bytes(16, 0), Bytes(16, 0)));
  Rng rng(6);
  for (int i = 0; i < 100000; ++i) explore_round(state, backend, rng);
  EXPECT_TRUE(state.violations.empty());
  EXPECT_TRUE(state.check_invariants().empty());
}

TEST(Explore, ForcedUniformPublicSharedAcrossSteps) {
  auto backend = backend_for("sparse-leak");
  FuzzerState state;
  state.add_to_corpus(explicit_seed(Bytes(4, 0), Bytes(4, 0)));
  Rng rng(7);
  ExploreOptions opts;
  opts.force_uniform_public = true;
  std::vector<Bytes> publics;
  opts.observer = [&](ExploreStep, const StructuredInput&, const StructuredInput& in) {
    publics.push_back(in.public_part);
  };
  explore_round(state, backend, rng, 0, opts);
  ASSERT_EQ(publics.size(), 3u);
  EXPECT_EQ(publics[0], publics[1]);
  EXPECT_EQ(publics[1], publics[2]);
  EXPECT_EQ(publics[0].size(), 4u);
}

TEST(Explore, EmptyCorpusThrows) {
  auto backend = backend_for("constant");
  FuzzerState state;
  Rng rng(8);
  EXPECT_THROW(explore_round(state, backend, rng), PreconditionError);
}

}  // namespace
}  // namespace nifuzz
