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

#include "core/exploit.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <unordered_set>

#include "core/errors.hpp"

namespace nifuzz {
namespace {

ExecutionResult run_hooked(TargetBackend& backend, const StructuredInput& input,
                           const ExploitHooks& hooks) {
  ExecutionResult r = backend.run(input);
  if (hooks.on_execution) hooks.on_execution(input, r);
  return r;
}

void erase_bits_everywhere(BitflipMap& map, const std::set<std::size_t>& bits) {
  if (bits.empty()) return;
  for (auto& [_, outs] : map) {
    for (std::size_t b : bits) outs.erase(b);
  }
}

void drop_empty(BitflipMap& map) {
  std::erase_if(map, [](const auto& kv) { return kv.second.empty(); });
}

std::optional<BitflipMap> run_pipeline(TargetBackend& backend, const StructuredInput& input,
                                       Rng& rng, const ExploitOptions& options) {
  const auto influences = find_influences(backend, input, options.hooks);
  if (!influences) return std::nullopt;
  BitflipMap map;
  if (influences->coords.size() < options.slow_limit) {
    map = bitflip_map_slow(backend, input, *influences, options.hooks);
  } else {
    map = bitflip_map_fast(backend, input, *influences, options.hooks);
    add_zero_ordinal(backend, input, *influences, map, options.hooks);
  }
  return stabilize_map(backend, input, std::move(map), rng, options.stabilize, options.hooks);
}

}  // namespace

std::optional<InfluenceSet> find_influences(TargetBackend& backend, const StructuredInput& input,
                                            const ExploitHooks& hooks) {
  const auto baseline = check_stability(backend, input, 2);
  if (!baseline) return std::nullopt;
  InfluenceSet set;
  for (SecretPartId part : kAllSecretParts) {
    const auto& bytes = input.secret(part);
    if (!bytes || bytes->empty()) continue;
    StructuredInput flipped = input;
    for (auto& b : *flipped.secret(part)) b = static_cast<std::uint8_t>(~b);
    const ExecutionResult r = run_hooked(backend, flipped, hooks);
    if (r.output == *baseline) continue;
    for (std::size_t i = 0; i < bytes->size() * 8; ++i) set.coords.push_back({part, i});
  }
  return set;
}

BitflipMap bitflip_map_slow(TargetBackend& backend, const StructuredInput& input,
                            const InfluenceSet& influences, const ExploitHooks& hooks) {
  BitflipMap map;
  if (influences.coords.empty()) return map;
  const OutputData original = run_hooked(backend, input, hooks).output;
  std::set<std::size_t> seen;
  StructuredInput mutated = input;
  for (const BitCoordinate& coord : influences.coords) {
    flip_bit_in_place(mutated, coord);
    const ExecutionResult r = run_hooked(backend, mutated, hooks);
    flip_bit_in_place(mutated, coord);
    const BitDiff diff = find_flipped_bits(original, r.output);
    if (diff.length_mismatch) continue;  // length change: no entry

    const std::set<std::size_t> flips(diff.flipped.begin(), diff.flipped.end());
    std::set<std::size_t> many_to_ones;
    std::set_intersection(seen.begin(), seen.end(), flips.begin(), flips.end(),
                          std::inserter(many_to_ones, many_to_ones.end()));
    erase_bits_everywhere(map, many_to_ones);
    seen.insert(flips.begin(), flips.end());
    std::set<std::size_t> own;
    std::set_difference(flips.begin(), flips.end(), many_to_ones.begin(), many_to_ones.end(),
                        std::inserter(own, own.end()));
    map[coord] = std::move(own);
  }
  drop_empty(map);
  return map;
}

BitflipMap bitflip_map_fast(TargetBackend& backend, const StructuredInput& input,
                            const InfluenceSet& influences, const ExploitHooks& hooks,
                            std::vector<FastRound>* trace) {
  BitflipMap map;
  const std::size_t n = influences.coords.size();
  if (n == 0) return map;
  const OutputData original = run_hooked(backend, input, hooks).output;
  const int rounds = n <= 1 ? 0 : static_cast<int>(std::bit_width(n - 1));  // ceil(log2 n)

  std::map<std::size_t, std::uint64_t> output_to_input;
  for (int bit = 1; bit <= rounds; ++bit) {
    const std::uint64_t bit_value = std::uint64_t{1} << (bit - 1);
    StructuredInput mutated = input;
    for (std::size_t index = 0; index < n; ++index) {
      if ((index / bit_value) % 2 == 1) flip_bit_in_place(mutated, influences.coords[index]);
    }
    ExecutionResult r = run_hooked(backend, mutated, hooks);
    const BitDiff diff = find_flipped_bits(original, r.output);
    for (std::size_t o : diff.flipped) output_to_input[o] += bit_value;
    if (trace != nullptr) {
      trace->push_back(
          {bit, bit_value, std::move(mutated), std::move(r.output), diff.flipped, output_to_input});
    }
  }
  for (const auto& [output_bit, code] : output_to_input) {
    // Codes beyond the last ordinal come from interference; no input owns them.
    if (code > 0 && code < n) map[influences.coords[code]].insert(output_bit);
  }
  return map;
}

void add_zero_ordinal(TargetBackend& backend, const StructuredInput& input,
                      const InfluenceSet& influences, BitflipMap& map, const ExploitHooks& hooks) {
  if (influences.coords.empty()) return;
  const BitCoordinate zero = influences.coords.front();
  const OutputData original = run_hooked(backend, input, hooks).output;
  const ExecutionResult r = run_hooked(backend, flip_bit(input, zero), hooks);
  const BitDiff diff = find_flipped_bits(original, r.output);
  if (diff.length_mismatch) return;

  std::unordered_set<std::size_t> mapped;
  for (const auto& [coord, outs] : map) {
    if (coord != zero) mapped.insert(outs.begin(), outs.end());
  }
  std::set<std::size_t> shared;
  std::set<std::size_t> own;
  for (std::size_t o : diff.flipped) (mapped.contains(o) ? shared : own).insert(o);
  erase_bits_everywhere(map, shared);
  if (!own.empty()) map[zero].insert(own.begin(), own.end());
  drop_empty(map);
}

BitflipMap stabilize_map(TargetBackend& backend, const StructuredInput& input, BitflipMap map,
                         Rng& rng, const StabilizeOptions& options, const ExploitHooks& hooks) {
  if (map.empty()) return map;
  const OutputData original = run_hooked(backend, input, hooks).output;
  static constexpr std::pair<int, int> kFractions[] = {{3, 4}, {1, 2}, {1, 4}, {1, 8}};

  // One combined-flip test; returns true if it filtered anything.
  auto test = [&](const std::vector<BitCoordinate>& subset) {
    StructuredInput mutated = input;
    std::set<std::size_t> predicted;
    for (const BitCoordinate& c : subset) {
      flip_bit_in_place(mutated, c);
      predicted.insert(map.at(c).begin(), map.at(c).end());
    }
    const ExecutionResult r = run_hooked(backend, mutated, hooks);
    const BitDiff diff = find_flipped_bits(original, r.output);
    if (diff.length_mismatch) {
      for (const BitCoordinate& c : subset) map.erase(c);
      return true;
    }
    const std::set<std::size_t> actual(diff.flipped.begin(), diff.flipped.end());
    std::set<std::size_t> wrong;
    std::set_symmetric_difference(actual.begin(), actual.end(), predicted.begin(),
                                  predicted.end(), std::inserter(wrong, wrong.end()));
    if (wrong.empty()) return false;
    erase_bits_everywhere(map, wrong);
    drop_empty(map);
    return true;
  };

  for (int sweep = 0; sweep < options.max_sweeps && !map.empty(); ++sweep) {
    bool filtered = false;
    std::vector<BitCoordinate> keys;
    for (const auto& [c, _] : map) keys.push_back(c);
    filtered |= test(keys);
    for (const auto& [num, den] : kFractions) {
      for (int s = 0; s < options.subsets_per_fraction && !map.empty(); ++s) {
        keys.clear();
        for (const auto& [c, _] : map) keys.push_back(c);
        const std::size_t k = std::max<std::size_t>(1, keys.size() * num / den);
        for (std::size_t i = 0; i < k; ++i) {
          std::uniform_int_distribution<std::size_t> pick(i, keys.size() - 1);
          std::swap(keys[i], keys[pick(rng)]);
        }
        keys.resize(k);
        filtered |= test(keys);
      }
    }
    if (!filtered) break;
  }
  return map;
}

std::size_t compute_extension(const BitflipMap& map) {
  std::size_t best = 0;
  for (const auto& [_, outs] : map) {
    if (!outs.empty()) best = std::max(best, *outs.rbegin() - *outs.begin());
  }
  return best;
}

std::size_t compute_extension(const BitflipMap& map, SecretPartId part) {
  std::size_t best = 0;
  for (const auto& [coord, outs] : map) {
    if (coord.part == part && !outs.empty()) {
      best = std::max(best, *outs.rbegin() - *outs.begin());
    }
  }
  return best;
}

MappingResult map_direct_bits(TargetBackend& backend, const StructuredInput& input, Rng& rng,
                              const ExploitOptions& options) {
  MappingResult result{run_pipeline(backend, input, rng, options), input, false};
  if (!result.map || compute_extension(*result.map) == 0) return result;

  StructuredInput extended = input;
  bool changed = false;
  for (SecretPartId part : kAllSecretParts) {
    const std::size_t spread = compute_extension(*result.map, part);
    const auto& bytes = extended.secret(part);
    if (spread == 0 || !bytes) continue;
    const std::size_t current = bytes->size() * 8;
    const std::size_t target = std::min(current + spread, options.max_part_size * 8);
    if (target <= current) continue;
    extended = extend_secret_part(extended, part, target);
    changed = true;
  }
  if (!changed) return result;

  auto second = run_pipeline(backend, extended, rng, options);
  if (second) {
    result.map = std::move(second);
    result.final_input = std::move(extended);
    result.extended = true;
  }
  return result;
}

ExploitPassReport exploit_pass(FuzzerState& state, TargetBackend& backend,
                               std::size_t violation_index, Rng& rng,
                               const ExploitOptions& options) {
  if (violation_index >= state.violations.size()) {
    throw PreconditionError("violation index out of range");
  }
  const std::uint64_t start = backend.executions();
  Violation& v = state.violations[violation_index];
  ++v.visits;
  IOHashValue& io = state.at(v.public_hash);
  ExploitPassReport report;

  if (!io.bitflips_done) {
    report.mapping_pass = true;
    ExploitOptions recorded = options;
    recorded.hooks.on_execution = [&](const StructuredInput& in, const ExecutionResult& r) {
      state.record_execution(in, r, Phase::kNonUniform);
      if (options.hooks.on_execution) options.hooks.on_execution(in, r);
    };
    MappingResult m = map_direct_bits(backend, v.exploit_input, rng, recorded);
    report.unstable = !m.map.has_value();
    io.bitflip_map = m.map.value_or(BitflipMap{});
    io.bitflips_done = true;
    if (m.map) v.exploit_input = std::move(m.final_input);
  } else {
    report.cancelled = !uniform_sampling_round(state, backend, violation_index, rng, options);
  }
  report.executions = backend.executions() - start;
  return report;
}

bool uniform_sampling_round(FuzzerState& state, TargetBackend& backend,
                            std::size_t violation_index, Rng& rng,
                            const ExploitOptions& options) {
  if (violation_index >= state.violations.size()) {
    throw PreconditionError("violation index out of range");
  }
  const Violation& v = state.violations[violation_index];
  if (!state.at(v.public_hash).bitflips_done) {
    throw PreconditionError("uniform sampling before bit mapping");
  }
  StructuredInput sample = v.exploit_input;
  for (std::uint64_t i = 0; i < options.uniform_samples; ++i) {
    if ((i & 0xFF) == 0 && options.hooks.should_stop && options.hooks.should_stop()) return false;
    uniform_sample_secrets_in_place(sample, rng);
    const ExecutionResult r = backend.run(sample);
    state.record_execution(sample, r, Phase::kUniform);
    if (options.hooks.on_execution) options.hooks.on_execution(sample, r);
  }
  return true;
}

}  // namespace nifuzz
