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

// Campaign driver: seeds the state, interleaves explore rounds and exploit
// passes until the budget runs out, emits statistics and writes artifacts.

#ifndef NIFUZZ_CORE_CAMPAIGN_HPP_
#define NIFUZZ_CORE_CAMPAIGN_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "core/estimators.hpp"
#include "core/executor.hpp"
#include "core/state.hpp"

namespace nifuzz {

struct CampaignConfig {
  // "inproc:<name>" or a path to an executable.
  std::string target;
  std::string seeds_dir;
  // Empty: the in-process target's own parts, or explicit for executables.
  PartSet parts;
  double budget_secs = 60.0;
  double timeout_secs = 1.0;
  std::size_t map_size = kDefaultMapSize;
  std::uint64_t rng_seed = 0;
  bool force_uniform_public = false;
  std::uint64_t min_hits = kDefaultMinHits;
  // Empty: no files are written.
  std::string out_dir;
  // 0: unlimited.
  std::uint64_t max_execs = 0;
  // Time advances 1 us per execution instead of following the wall clock.
  bool virtual_clock = false;
  // Resident-set ceiling; 0 disables the check.
  std::uint64_t memory_budget_mb = 4096;
  std::size_t max_part_size = kDefaultMaxPartSize;
  double stats_interval_secs = 5.0;
};

// Throws ConfigError on an invalid combination.
void validate(const CampaignConfig& config);

// Resolves the target; ConfigError if unknown or not executable.
std::unique_ptr<TargetBackend> make_backend(const CampaignConfig& config);
PartSet resolve_parts(const CampaignConfig& config);

// Seed files sorted by name, coerced to `parts`; the built-in seed if none.
std::vector<StructuredInput> load_seeds(const std::string& dir, PartSet parts);
StructuredInput builtin_seed(PartSet parts);

enum class StopReason : std::uint8_t { kBudget, kMaxExecs, kRequested, kMemoryBudget };
std::string_view stop_reason_name(StopReason reason);

struct CampaignHooks {
  // Called for every stats line; returning true ends the campaign.
  std::function<bool(const QifReport&)> on_stats;
};

struct CampaignResult {
  QifReport report;
  StopReason stop_reason = StopReason::kBudget;
  std::string diagnostic;
  std::unique_ptr<FuzzerState> state;
};

CampaignResult run_campaign(const CampaignConfig& config, const CampaignHooks& hooks = {});

// Same, with a caller-supplied backend (tests, custom targets).
CampaignResult run_campaign(const CampaignConfig& config, TargetBackend& backend,
                            const CampaignHooks& hooks = {});

// stats.jsonl line: the report plus a timestamp.
nlohmann::json stats_line(const QifReport& report, double timestamp);

// report.json, state_snapshot.json and the violations/ tree.
void write_artifacts(const std::string& out_dir, const FuzzerState& state,
                     const QifReport& report, std::uint64_t min_hits);

struct ReplayOutcome {
  std::string path;
  OutputData output;
  ExitKind exit_kind = ExitKind::kNormal;
};

// `path` is a witness file or a directory searched recursively for *.bin.
std::vector<ReplayOutcome> replay(TargetBackend& backend, const std::string& path);

// Recomputes the report from a state snapshot file.
QifReport report_from_snapshot(const std::string& path, std::optional<std::uint64_t> min_hits);

// Resident set size of this process in bytes, 0 if unknown.
std::uint64_t current_rss_bytes();

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_CAMPAIGN_HPP_
