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

// nifuzz command-line front end. Talks to the library only through the C
// interface.
//
//   nifuzz fuzz --target inproc:target-func --budget-secs 60 --out run1
//   nifuzz replay --target inproc:target-func run1/violations/<hash>
//   nifuzz report run1/state_snapshot.json
//   nifuzz targets

#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nifuzz/nifuzz.h"

namespace {

constexpr int kExitUsage = NIFUZZ_ERR_CONFIG;

struct ConfigDeleter {
  void operator()(nifuzz_config* c) const { nifuzz_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<nifuzz_config, ConfigDeleter>;

struct Options {
  std::string target;
  std::string seeds;
  std::string parts;
  double timeout_secs = 1.0;
  double budget_secs = 60.0;
  std::size_t map_size = 65536;
  std::uint64_t rng_seed = 0;
  bool force_uniform_public = false;
  std::int64_t min_hits = -1;
  std::string out;
  std::uint64_t max_execs = 0;
  bool virtual_clock = false;
  std::uint64_t memory_budget_mb = 4096;
  bool quiet = false;
  std::string path;
};

int report_failure(nifuzz_status s) {
  std::cerr << "nifuzz: " << nifuzz_status_name(s) << ": " << nifuzz_last_error() << "\n";
  return s == NIFUZZ_ERR_INVALID_ARGUMENT || s == NIFUZZ_ERR_FORMAT ? kExitUsage
                                                                     : static_cast<int>(s);
}

// Runs a text-producing call twice: size query, then fill.
nifuzz_status fetch(const std::function<nifuzz_status(char*, size_t, size_t*)>& call,
                    std::string& out) {
  size_t needed = 0;
  nifuzz_status s = call(nullptr, 0, &needed);
  if (s != NIFUZZ_OK && s != NIFUZZ_ERR_BUFFER_TOO_SMALL) return s;
  std::vector<char> buf(needed);
  s = call(buf.data(), buf.size(), &needed);
  if (s == NIFUZZ_OK) out.assign(buf.data());
  return s;
}

nifuzz_status build_config(const Options& o, ConfigPtr& out) {
  nifuzz_config* raw = nullptr;
  nifuzz_status s = nifuzz_config_create(&raw);
  if (s != NIFUZZ_OK) return s;
  out.reset(raw);
  nifuzz_config* c = out.get();
  auto chain = [&s](nifuzz_status next) {
    if (s == NIFUZZ_OK) s = next;
  };
  chain(nifuzz_config_set_target(c, o.target.c_str()));
  if (!o.seeds.empty()) chain(nifuzz_config_set_seeds_dir(c, o.seeds.c_str()));
  if (!o.parts.empty()) chain(nifuzz_config_set_parts(c, o.parts.c_str()));
  chain(nifuzz_config_set_timeout_secs(c, o.timeout_secs));
  chain(nifuzz_config_set_budget_secs(c, o.budget_secs));
  chain(nifuzz_config_set_map_size(c, o.map_size));
  chain(nifuzz_config_set_rng_seed(c, o.rng_seed));
  chain(nifuzz_config_set_force_uniform_public(c, o.force_uniform_public ? 1 : 0));
  if (o.min_hits >= 0) chain(nifuzz_config_set_min_hits(c, static_cast<std::uint64_t>(o.min_hits)));
  if (!o.out.empty()) chain(nifuzz_config_set_out_dir(c, o.out.c_str()));
  chain(nifuzz_config_set_max_execs(c, o.max_execs));
  chain(nifuzz_config_set_virtual_clock(c, o.virtual_clock ? 1 : 0));
  chain(nifuzz_config_set_memory_budget_mb(c, o.memory_budget_mb));
  return s;
}

int progress_line(const char* stats_json, void* user) {
  if (!*static_cast<bool*>(user)) std::cerr << stats_json << "\n";
  return 0;
}

int cmd_fuzz(Options& o) {
  ConfigPtr config;
  nifuzz_status s = build_config(o, config);
  if (s != NIFUZZ_OK) return report_failure(s);
  nifuzz_campaign* campaign = nullptr;
  s = nifuzz_campaign_create(config.get(), &campaign);
  if (s != NIFUZZ_OK) return report_failure(s);
  const nifuzz_status run = nifuzz_campaign_run(campaign, progress_line, &o.quiet);
  std::string report;
  if (run == NIFUZZ_OK || run == NIFUZZ_ERR_MEMORY_BUDGET) {
    const nifuzz_status r = fetch(
        [&](char* b, size_t n, size_t* need) { return nifuzz_campaign_report_json(campaign, b, n, need); },
        report);
    if (r == NIFUZZ_OK) std::cout << report << "\n";
  }
  int code = 0;
  if (run != NIFUZZ_OK) code = report_failure(run);
  nifuzz_campaign_destroy(campaign);
  return code;
}

int cmd_replay(const Options& o) {
  ConfigPtr config;
  nifuzz_status s = build_config(o, config);
  if (s != NIFUZZ_OK) return report_failure(s);
  std::string text;
  s = fetch([&](char* b, size_t n, size_t* need) {
    return nifuzz_replay(config.get(), o.path.c_str(), b, n, need);
  }, text);
  if (s != NIFUZZ_OK) return report_failure(s);
  std::cout << text << "\n";
  return 0;
}

int cmd_report(const Options& o) {
  std::string text;
  const nifuzz_status s = fetch([&](char* b, size_t n, size_t* need) {
    return nifuzz_report_from_snapshot(o.path.c_str(), o.min_hits, b, n, need);
  }, text);
  if (s != NIFUZZ_OK) return report_failure(s);
  std::cout << text << "\n";
  return 0;
}

int cmd_targets() {
  std::string text;
  const nifuzz_status s = fetch(nifuzz_list_targets, text);
  if (s != NIFUZZ_OK) return report_failure(s);
  std::cout << text << "\n";
  return 0;
}

void add_target_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--target", o.target, "inproc:<name> or path to an instrumented executable")
      ->required();
  cmd->add_option("--parts", o.parts, "secret parts, e.g. explicit,stack,heap");
  cmd->add_option("--timeout-secs", o.timeout_secs, "per-execution timeout")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--map-size", o.map_size, "coverage map size")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nifuzz: non-interference fuzzer and leakage quantifier"};
  app.set_version_flag("--version", std::string(nifuzz_version()));
  app.require_subcommand(1);
  Options o;

  CLI::App* fuzz = app.add_subcommand("fuzz", "run a campaign");
  add_target_options(fuzz, o);
  fuzz->add_option("--seeds", o.seeds, "directory of seed inputs (container format)");
  fuzz->add_option("--budget-secs", o.budget_secs, "campaign time budget")
      ->check(CLI::PositiveNumber);
  fuzz->add_option("--rng-seed", o.rng_seed, "random seed");
  fuzz->add_flag("--force-uniform-public", o.force_uniform_public,
                 "draw public parts uniformly instead of from the corpus");
  fuzz->add_option("--min-hits", o.min_hits, "executions before a public input counts (default 8)")
      ->check(CLI::NonNegativeNumber);
  fuzz->add_option("--out", o.out, "output directory");
  fuzz->add_option("--max-execs", o.max_execs, "stop after this many executions (0 = no limit)");
  fuzz->add_flag("--virtual-clock", o.virtual_clock, "advance time 1 us per execution");
  fuzz->add_option("--memory-budget-mb", o.memory_budget_mb, "resident-set ceiling (0 = off)");
  fuzz->add_flag("-q,--quiet", o.quiet, "do not echo stats lines to stderr");

  CLI::App* rep = app.add_subcommand("replay", "re-execute stored witnesses");
  add_target_options(rep, o);
  rep->add_option("witness", o.path, "witness file or violation directory")->required();

  CLI::App* report = app.add_subcommand("report", "recompute metrics from a state snapshot");
  report->add_option("snapshot", o.path, "state_snapshot.json")->required();
  report->add_option("--min-hits", o.min_hits, "override the snapshot's min hits")
      ->check(CLI::NonNegativeNumber);

  CLI::App* targets = app.add_subcommand("targets", "list in-process targets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (fuzz->parsed()) return cmd_fuzz(o);
  if (rep->parsed()) return cmd_replay(o);
  if (report->parsed()) return cmd_report(o);
  if (targets->parsed()) return cmd_targets();
  return kExitUsage;
}
