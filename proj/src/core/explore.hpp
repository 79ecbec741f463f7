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

// Explore stage: coverage-guided search with paired public/secret mutations.

#ifndef NIFUZZ_CORE_EXPLORE_HPP_
#define NIFUZZ_CORE_EXPLORE_HPP_

#include <cstdint>
#include <functional>

#include "core/executor.hpp"
#include "core/mutate.hpp"
#include "core/state.hpp"

namespace nifuzz {

struct ExploreRoundReport {
  std::uint64_t executions = 0;  // including confirmation re-runs
  std::uint64_t new_coverage_inputs = 0;
  std::uint64_t new_violations = 0;
};

enum class ExploreStep : std::uint8_t {
  kPublicOnly = 2,
  kSecretOnly = 3,
  kCombined = 4,
};

struct ExploreOptions {
  std::size_t max_part_size = kDefaultMaxPartSize;
  // Replace the base's public part with a uniformly chosen recorded public
  // or a fresh uniform draw of the same length, kept for all three steps.
  bool force_uniform_public = false;
  // Sees every input right before it runs.
  std::function<void(ExploreStep, const StructuredInput& base, const StructuredInput& executed)>
      observer;
};

// Records one execution, adds coverage-novel inputs to the corpus when
// `grow_corpus`, and confirms any violation candidate.
struct RecordStats {
  std::uint64_t confirm_executions = 0;
  std::uint64_t new_coverage_inputs = 0;
  std::uint64_t new_violations = 0;
};
RecordOutcome record_and_confirm(FuzzerState& state, TargetBackend& backend,
                                 const StructuredInput& input, const ExecutionResult& result,
                                 Phase phase, bool grow_corpus, RecordStats& stats);

// Runs steps 2-4 on corpus entry `base_index`.
ExploreRoundReport explore_round(FuzzerState& state, TargetBackend& backend, Rng& rng,
                                 std::size_t base_index, const ExploreOptions& options = {});

// Picks a main-corpus entry itself; throws if the corpus is empty.
ExploreRoundReport explore_round(FuzzerState& state, TargetBackend& backend, Rng& rng,
                                 const ExploreOptions& options = {});

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_EXPLORE_HPP_
