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

#include "core/explore.hpp"

#include "core/errors.hpp"

namespace nifuzz {

RecordOutcome record_and_confirm(FuzzerState& state, TargetBackend& backend,
                                 const StructuredInput& input, const ExecutionResult& result,
                                 Phase phase, bool grow_corpus, RecordStats& stats) {
  RecordOutcome outcome = state.record_execution(input, result, phase);
  if (grow_corpus && outcome.new_coverage) {
    state.add_to_corpus(input);
    ++stats.new_coverage_inputs;
  }
  if (outcome.candidate) {
    const std::uint64_t before = backend.executions();
    if (state.confirm_violation(backend, outcome.public_hash, *outcome.candidate)) {
      ++stats.new_violations;
    }
    stats.confirm_executions += backend.executions() - before;
  }
  return outcome;
}

ExploreRoundReport explore_round(FuzzerState& state, TargetBackend& backend, Rng& rng,
                                 std::size_t base_index, const ExploreOptions& options) {
  if (base_index >= state.corpus.size()) throw PreconditionError("corpus index out of range");
  const std::uint64_t start = backend.executions();
  StructuredInput base = state.corpus[base_index];
  const bool probe_parts = base.stack_secret.has_value() || base.heap_secret.has_value();
  SecretVariant secret_variant = SecretVariant::kHavoc;
  if (probe_parts) {
    if (!state.corpus_probed[base_index] || (rng() & 1) != 0) secret_variant = SecretVariant::kProbe;
    state.corpus_probed[base_index] = 1;
  }
  if (options.force_uniform_public) {
    // Half the rounds revisit a recorded public, half add a fresh uniform
    // draw; the recorded set stays uniformly distributed either way.
    if (!state.public_order.empty() && (rng() & 1) != 0) {
      std::uniform_int_distribution<std::size_t> pick(0, state.public_order.size() - 1);
      base.public_part = state.map.at(state.public_order[pick(rng)]).representative_public_input;
    } else {
      fill_uniform(base.public_part, rng);
    }
  }

  RecordStats stats;
  auto execute = [&](ExploreStep step, const StructuredInput& input) {
    if (options.observer) options.observer(step, base, input);
    const ExecutionResult result = backend.run(input);
    record_and_confirm(state, backend, input, result, Phase::kNonUniform, true, stats);
  };

  // Rebuilt per use: recording may grow the corpus and move its storage.
  auto ctx = [&] { return MutationContext{options.max_part_size, state.corpus}; };

  // Step 2: public mutated, secret kept. Under forced-uniform publics the
  // fresh draw is the public mutation.
  StructuredInput step2 = options.force_uniform_public ? base : mutate_public(base, rng, ctx());
  execute(ExploreStep::kPublicOnly, step2);

  // Step 3: secret mutated, public kept.
  StructuredInput step3 = mutate_secret(base, rng, secret_variant, ctx());
  execute(ExploreStep::kSecretOnly, step3);

  // Step 4: both mutated; probe rounds use the opposite patterns.
  const SecretVariant combined_variant =
      secret_variant == SecretVariant::kProbe ? SecretVariant::kProbeSwapped : SecretVariant::kHavoc;
  StructuredInput step4 = options.force_uniform_public ? base : mutate_public(base, rng, ctx());
  step4 = mutate_secret(step4, rng, combined_variant, ctx());
  execute(ExploreStep::kCombined, step4);

  return {backend.executions() - start, stats.new_coverage_inputs, stats.new_violations};
}

ExploreRoundReport explore_round(FuzzerState& state, TargetBackend& backend, Rng& rng,
                                 const ExploreOptions& options) {
  if (state.corpus.empty()) throw PreconditionError("main corpus is empty; at least one seed is needed");
  std::uniform_int_distribution<std::size_t> pick(0, state.corpus.size() - 1);
  return explore_round(state, backend, rng, pick(rng), options);
}

}  // namespace nifuzz
