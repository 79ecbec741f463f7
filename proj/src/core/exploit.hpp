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

// Exploit stage: quantifies a confirmed violation. Direct bit mappings from
// secret to output are found by bit flipping, cleaned up by combined-flip
// tests, widened by secret extension; later visits sample secrets uniformly.

#ifndef NIFUZZ_CORE_EXPLOIT_HPP_
#define NIFUZZ_CORE_EXPLOIT_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "core/executor.hpp"
#include "core/mutate.hpp"
#include "core/state.hpp"

namespace nifuzz {

inline constexpr std::size_t kSlowAlgorithmLimit = 1000;
inline constexpr std::uint64_t kUniformSamplesPerVisit = 65536;

struct ExploitHooks {
  // Sees every execution made by the mapping and sampling code.
  std::function<void(const StructuredInput&, const ExecutionResult&)> on_execution;
  // Polled between executions of long loops.
  std::function<bool()> should_stop;
};

// Influence coordinates, sorted by (part, bit_index); the position in this
// list is the ordinal used by the fast algorithm.
struct InfluenceSet {
  std::vector<BitCoordinate> coords;
};

// nullopt when the baseline output is not reproducible.
std::optional<InfluenceSet> find_influences(TargetBackend& backend, const StructuredInput& input,
                                            const ExploitHooks& hooks = {});

BitflipMap bitflip_map_slow(TargetBackend& backend, const StructuredInput& input,
                            const InfluenceSet& influences, const ExploitHooks& hooks = {});

struct FastRound {
  int bit = 0;
  std::uint64_t bit_value = 0;
  StructuredInput mutated_input;
  OutputData output;
  std::vector<std::size_t> output_flips;
  std::map<std::size_t, std::uint64_t> output_to_input;  // non-zero codes after this round
};

BitflipMap bitflip_map_fast(TargetBackend& backend, const StructuredInput& input,
                            const InfluenceSet& influences, const ExploitHooks& hooks = {},
                            std::vector<FastRound>* trace = nullptr);

// The fast algorithm cannot see ordinal 0 (its code is 0). One extra flip
// of that coordinate adds its output bits, minus any already mapped
// elsewhere, which are then dropped everywhere as many-to-one.
void add_zero_ordinal(TargetBackend& backend, const StructuredInput& input,
                      const InfluenceSet& influences, BitflipMap& map,
                      const ExploitHooks& hooks = {});

struct StabilizeOptions {
  int subsets_per_fraction = 8;
  int max_sweeps = 64;
};

BitflipMap stabilize_map(TargetBackend& backend, const StructuredInput& input, BitflipMap map,
                         Rng& rng, const StabilizeOptions& options = {},
                         const ExploitHooks& hooks = {});

std::size_t compute_extension(const BitflipMap& map);
// Same, restricted to entries of one part.
std::size_t compute_extension(const BitflipMap& map, SecretPartId part);

struct ExploitOptions {
  std::size_t max_part_size = kDefaultMaxPartSize;
  std::size_t slow_limit = kSlowAlgorithmLimit;
  std::uint64_t uniform_samples = kUniformSamplesPerVisit;
  StabilizeOptions stabilize;
  ExploitHooks hooks;
};

struct MappingResult {
  std::optional<BitflipMap> map;  // nullopt: unstable baseline
  StructuredInput final_input;
  bool extended = false;
};

// influences -> slow/fast map -> stabilize; then, if some entry spans
// several output bits, extend those parts and run the pipeline once more.
MappingResult map_direct_bits(TargetBackend& backend, const StructuredInput& input, Rng& rng,
                              const ExploitOptions& options = {});

struct ExploitPassReport {
  bool mapping_pass = false;
  bool unstable = false;
  bool cancelled = false;
  std::uint64_t executions = 0;
};

// First visit maps direct bits; later visits run uniform sampling.
ExploitPassReport exploit_pass(FuzzerState& state, TargetBackend& backend,
                               std::size_t violation_index, Rng& rng,
                               const ExploitOptions& options = {});

// Returns false if stopped early through hooks.should_stop.
bool uniform_sampling_round(FuzzerState& state, TargetBackend& backend,
                            std::size_t violation_index, Rng& rng,
                            const ExploitOptions& options = {});

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_EXPLOIT_HPP_
