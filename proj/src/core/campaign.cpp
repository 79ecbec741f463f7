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

#include "core/campaign.hpp"

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "core/errors.hpp"
#include "core/explore.hpp"
#include "core/exploit.hpp"
#include "core/subprocess.hpp"
#include "core/targets.hpp"

namespace nifuzz {
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBuiltinSeedSize = 16;
constexpr double kVirtualSecondsPerExec = 1e-6;
constexpr std::uint64_t kMemoryCheckEvery = 64;
constexpr std::string_view kInprocPrefix = "inproc:";

class Clock {
 public:
  Clock(bool virtual_time, const TargetBackend& backend)
      : virtual_(virtual_time), backend_(backend), start_(std::chrono::steady_clock::now()) {}

  double elapsed() const {
    if (virtual_) return static_cast<double>(backend_.executions()) * kVirtualSecondsPerExec;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  double timestamp() const {
    if (virtual_) return elapsed();
    return std::chrono::duration<double>(std::chrono::system_clock::now().time_since_epoch())
        .count();
  }

 private:
  bool virtual_;
  const TargetBackend& backend_;
  std::chrono::steady_clock::time_point start_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

void validate(const CampaignConfig& c) {
  if (c.target.empty()) throw ConfigError("no target given");
  if (!(c.budget_secs > 0.0)) throw ConfigError("time budget must be positive");
  if (!(c.timeout_secs > 0.0)) throw ConfigError("execution timeout must be positive");
  if (c.map_size == 0) throw ConfigError("map size must be positive");
  if (c.max_part_size == 0) throw ConfigError("max part size must be positive");
  if (!c.seeds_dir.empty() && !fs::is_directory(c.seeds_dir)) {
    throw ConfigError("seed directory '" + c.seeds_dir + "' does not exist");
  }
  if (resolve_parts(c).empty()) throw ConfigError("at least one secret part must be declared");
}

PartSet resolve_parts(const CampaignConfig& c) {
  if (!c.parts.empty()) return c.parts;
  if (c.target.starts_with(kInprocPrefix)) {
    if (auto info = find_target(c.target.substr(kInprocPrefix.size()))) return info->parts;
  }
  PartSet p;
  p.insert(SecretPartId::kExplicit);
  return p;
}

std::unique_ptr<TargetBackend> make_backend(const CampaignConfig& c) {
  if (c.target.starts_with(kInprocPrefix)) {
    const std::string name = c.target.substr(kInprocPrefix.size());
    auto info = find_target(name);
    if (!info) throw ConfigError("unknown in-process target '" + name + "'");
    return std::make_unique<InProcessBackend>(info->make(), name, c.map_size);
  }
  const auto timeout = std::chrono::milliseconds(
      std::max<std::int64_t>(1, static_cast<std::int64_t>(c.timeout_secs * 1000.0)));
  return std::make_unique<SubprocessBackend>(c.target, timeout, c.map_size);
}

StructuredInput builtin_seed(PartSet parts) {
  StructuredInput s;
  s.public_part.assign(kBuiltinSeedSize, 0);
  for (SecretPartId p : kAllSecretParts) {
    if (parts.contains(p)) s.secret(p) = Bytes(kBuiltinSeedSize, 0);
  }
  return s;
}

std::vector<StructuredInput> load_seeds(const std::string& dir, PartSet parts) {
  std::vector<StructuredInput> seeds;
  if (!dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file()) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      StructuredInput in;
      try {
        in = read_input_file(f.string());
      } catch (const FormatError& ex) {
        throw ConfigError("seed " + f.string() + ": " + ex.what());
      }
      for (SecretPartId p : kAllSecretParts) {
        auto& part = in.secret(p);
        if (!parts.contains(p)) {
          part.reset();
        } else if (!part) {
          part = Bytes(kBuiltinSeedSize, 0);
        }
      }
      seeds.push_back(std::move(in));
    }
  }
  if (seeds.empty()) seeds.push_back(builtin_seed(parts));
  return seeds;
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::kBudget:
      return "time budget";
    case StopReason::kMaxExecs:
      return "execution budget";
    case StopReason::kRequested:
      return "stop requested";
    case StopReason::kMemoryBudget:
      return "memory budget";
  }
  return "?";
}

std::uint64_t current_rss_bytes() {
  std::ifstream statm("/proc/self/statm");
  std::uint64_t size = 0;
  std::uint64_t resident = 0;
  if (!(statm >> size >> resident)) return 0;
  return resident * static_cast<std::uint64_t>(::sysconf(_SC_PAGESIZE));
}

nlohmann::json stats_line(const QifReport& report, double timestamp) {
  nlohmann::json j = to_json(report);
  j["timestamp"] = timestamp;
  return j;
}

CampaignResult run_campaign(const CampaignConfig& config, const CampaignHooks& hooks) {
  validate(config);
  auto backend = make_backend(config);
  return run_campaign(config, *backend, hooks);
}

CampaignResult run_campaign(const CampaignConfig& config, TargetBackend& backend,
                            const CampaignHooks& hooks) {
  validate(config);
  const PartSet parts = resolve_parts(config);
  const std::vector<StructuredInput> seeds = load_seeds(config.seeds_dir, parts);

  CampaignResult result;
  result.state = std::make_unique<FuzzerState>();
  FuzzerState& state = *result.state;
  Rng rng(config.rng_seed);
  const std::uint64_t exec_base = backend.executions();
  const Clock clock(config.virtual_clock, backend);

  std::ofstream stats_file;
  bool stats_failed = false;
  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir);
    stats_file.open(fs::path(config.out_dir) / "stats.jsonl", std::ios::trunc);
    if (!stats_file) {
      std::cerr << "nifuzz: cannot open stats.jsonl; continuing without it\n";
      stats_failed = true;
    }
  }

  auto snapshot_report = [&] {
    QifReport r = compute_report(state, config.min_hits);
    r.executions = backend.executions() - exec_base;
    r.seconds = clock.elapsed();
    return r;
  };

  bool stop_requested = false;
  double last_stats = 0.0;
  auto emit = [&] {
    const QifReport r = snapshot_report();
    last_stats = clock.elapsed();
    if (stats_file.is_open() && !stats_failed) {
      stats_file << stats_line(r, clock.timestamp()).dump() << '\n';
      stats_file.flush();
      if (!stats_file) {
        std::cerr << "nifuzz: writing stats.jsonl failed; continuing without it\n";
        stats_failed = true;
      }
    }
    if (hooks.on_stats && hooks.on_stats(r)) stop_requested = true;
  };

  auto out_of_budget = [&]() -> std::optional<StopReason> {
    if (stop_requested) return StopReason::kRequested;
    if (config.max_execs != 0 && backend.executions() - exec_base >= config.max_execs) {
      return StopReason::kMaxExecs;
    }
    if (clock.elapsed() >= config.budget_secs) return StopReason::kBudget;
    return std::nullopt;
  };

  std::uint64_t iterations = 0;
  auto check_memory = [&] {
    if (config.memory_budget_mb == 0) return;
    const std::uint64_t rss = current_rss_bytes();
    if (rss > config.memory_budget_mb * 1024 * 1024) {
      throw MemoryBudgetError("resident set " + std::to_string(rss / (1024 * 1024)) +
                              " MiB exceeds the budget of " +
                              std::to_string(config.memory_budget_mb) + " MiB");
    }
  };

  ExploreOptions explore_opts;
  explore_opts.max_part_size = config.max_part_size;
  explore_opts.force_uniform_public = config.force_uniform_public;

  ExploitOptions exploit_opts;
  exploit_opts.max_part_size = config.max_part_size;
  exploit_opts.hooks.should_stop = [&] {
    if (out_of_budget()) return true;
    if ((++iterations % kMemoryCheckEvery) == 0) check_memory();
    return false;
  };

  try {
    RecordStats seed_stats;
    for (const StructuredInput& seed : seeds) {
      const ExecutionResult r = backend.run(seed);
      state.add_to_corpus(seed);
      record_and_confirm(state, backend, seed, r, Phase::kNonUniform, false, seed_stats);
    }
    emit();

    while (true) {
      if (auto reason = out_of_budget()) {
        result.stop_reason = *reason;
        break;
      }
      if ((++iterations % kMemoryCheckEvery) == 0) check_memory();
      const Selection sel = state.select_next(rng);
      if (sel.origin == Origin::kMainCorpus) {
        explore_round(state, backend, rng, sel.index, explore_opts);
        if (clock.elapsed() - last_stats >= config.stats_interval_secs) emit();
      } else {
        exploit_pass(state, backend, sel.index, rng, exploit_opts);
        emit();
      }
    }
  } catch (const MemoryBudgetError& ex) {
    result.stop_reason = StopReason::kMemoryBudget;
    result.diagnostic = ex.what();
  }

  result.report = snapshot_report();
  if (stats_file.is_open() && !stats_failed) {
    stats_file << stats_line(result.report, clock.timestamp()).dump() << '\n';
  }
  if (!config.out_dir.empty()) {
    write_artifacts(config.out_dir, state, result.report, config.min_hits);
  }
  return result;
}

void write_artifacts(const std::string& out_dir, const FuzzerState& state,
                     const QifReport& report, std::uint64_t min_hits) {
  const fs::path root(out_dir);
  fs::create_directories(root);
  write_text(root / "report.json", to_json(report).dump(2) + "\n");

  nlohmann::json snap = state.to_snapshot_json();
  snap["executions"] = report.executions;
  snap["seconds"] = report.seconds;
  snap["min_hits"] = min_hits;
  write_text(root / "state_snapshot.json", snap.dump() + "\n");

  for (const Violation& v : state.violations) {
    const fs::path dir = root / "violations" / v.public_hash.hex();
    fs::create_directories(dir);
    write_input_file((dir / (v.output_a.hex() + ".bin")).string(), v.witness_a);
    write_input_file((dir / (v.output_b.hex() + ".bin")).string(), v.witness_b);
    if (const IOHashValue* io = state.find(v.public_hash); io && io->bitflip_map) {
      write_text(dir / "bitflip_map.json", bitflip_map_to_json(*io->bitflip_map).dump(2) + "\n");
    }
  }
}

std::vector<ReplayOutcome> replay(TargetBackend& backend, const std::string& path) {
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    for (const auto& e : fs::recursive_directory_iterator(path)) {
      if (e.is_regular_file() && e.path().extension() == ".bin") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no witness files in " + path);
  } else if (fs::is_regular_file(path)) {
    files.push_back(path);
  } else {
    throw ConfigError("witness path '" + path + "' does not exist");
  }
  std::vector<ReplayOutcome> out;
  for (const auto& f : files) {
    StructuredInput in;
    try {
      in = read_input_file(f);
    } catch (const FormatError& ex) {
      throw ConfigError(f + ": " + ex.what());
    }
    ExecutionResult r = backend.run(in);
    out.push_back({f, std::move(r.output), r.exit_kind});
  }
  return out;
}

QifReport report_from_snapshot(const std::string& path, std::optional<std::uint64_t> min_hits) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open snapshot '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("snapshot is not valid JSON: ") + ex.what());
  }
  FuzzerState state;
  try {
    state = FuzzerState::from_snapshot_json(j);
  } catch (const FormatError& ex) {
    throw ConfigError(ex.what());
  }
  const std::uint64_t hits = min_hits.value_or(j.value("min_hits", kDefaultMinHits));
  QifReport r = compute_report(state, hits);
  r.executions = j.value("executions", std::uint64_t{0});
  r.seconds = j.value("seconds", 0.0);
  return r;
}

}  // namespace nifuzz
