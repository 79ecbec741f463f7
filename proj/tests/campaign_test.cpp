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


#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "core/campaign.hpp"
#include "core/errors.hpp"

namespace nifuzz {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nifuzz_campaign_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CampaignConfig quick(const std::string& target, double secs) {
  CampaignConfig c;
  c.target = "inproc:" + target;
  c.budget_secs = secs;
  c.virtual_clock = true;
  c.stats_interval_secs = 0.05;
  return c;
}

TEST(Campaign, ConstantTargetReportsNothing) {
  const CampaignResult r = run_campaign(quick("constant", 0.3));
  EXPECT_EQ(r.report.violations, 0u);
  EXPECT_EQ(r.report.cmi_bits, 0.0);
  EXPECT_EQ(r.report.capacity_lower_bound_bits, 0.0);
  EXPECT_EQ(r.report.direct_mapped_bits, (std::array<std::uint64_t, 3>{0, 0, 0}));
  EXPECT_EQ(r.stop_reason, StopReason::kBudget);
  EXPECT_GE(r.report.executions, 300000u);
}

TEST(Campaign, TargetFuncFindsTwoBits) {
  const CampaignResult r = run_campaign(quick("target-func", 1.0));
  EXPECT_GE(r.report.violations, 1u);
  EXPECT_DOUBLE_EQ(r.report.capacity_lower_bound_bits, 2.0);
  EXPECT_EQ(r.report.direct(SecretPartId::kExplicit), 2u);
  EXPECT_TRUE(r.state->check_invariants().empty());
}

TEST(Campaign, MaxExecsStopsEarly) {
  CampaignConfig c = quick("constant", 100.0);
  c.max_execs = 5000;
  const CampaignResult r = run_campaign(c);
  EXPECT_EQ(r.stop_reason, StopReason::kMaxExecs);
  EXPECT_GE(r.report.executions, 5000u);
  EXPECT_LT(r.report.executions, 5010u);
}

TEST(Campaign, HookCanStop) {
  CampaignHooks hooks;
  int calls = 0;
  hooks.on_stats = [&](const QifReport&) { return ++calls == 3; };
  const CampaignResult r = run_campaign(quick("constant", 100.0), hooks);
  EXPECT_EQ(r.stop_reason, StopReason::kRequested);
  EXPECT_EQ(calls, 3);
}

TEST(Campaign, SameSeedSameReport) {
  const fs::path a = fresh_dir("det_a");
  const fs::path b = fresh_dir("det_b");
  CampaignConfig c = quick("target-func", 0.5);
  c.rng_seed = 99;
  c.out_dir = a.string();
  run_campaign(c);
  c.out_dir = b.string();
  run_campaign(c);
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
  EXPECT_EQ(slurp(a / "state_snapshot.json"), slurp(b / "state_snapshot.json"));
}

TEST(Campaign, ArtifactsWritten) {
  const fs::path out = fresh_dir("artifacts");
  CampaignConfig c = quick("target-func", 0.5);
  c.out_dir = out.string();
  const CampaignResult r = run_campaign(c);
  ASSERT_TRUE(fs::exists(out / "report.json"));
  ASSERT_TRUE(fs::exists(out / "state_snapshot.json"));
  ASSERT_TRUE(fs::exists(out / "stats.jsonl"));

  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  for (const char* key : {"cmi_bits", "capacity_lower_bound_bits", "direct_mapped_bits",
                          "violations", "unique_public_inputs", "executions", "seconds"}) {
    EXPECT_TRUE(report.contains(key)) << key;
  }
  EXPECT_EQ(report.size(), 7u);

  // Stats lines: parseable, timestamps and capacity never decrease.
  std::ifstream stats(out / "stats.jsonl");
  std::string line;
  double last_cap = -1;
  double last_ts = -1;
  int lines = 0;
  while (std::getline(stats, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_GE(j.at("capacity_lower_bound_bits").get<double>(), last_cap);
    EXPECT_GE(j.at("timestamp").get<double>(), last_ts);
    last_cap = j.at("capacity_lower_bound_bits").get<double>();
    last_ts = j.at("timestamp").get<double>();
    ++lines;
  }
  // At least one line per stats interval of the budget.
  EXPECT_GE(lines, 10);

  // One directory per violation holding both witnesses.
  int dirs = 0;
  for (const auto& e : fs::directory_iterator(out / "violations")) {
    ++dirs;
    int bins = 0;
    for (const auto& f : fs::directory_iterator(e.path())) bins += f.path().extension() == ".bin";
    EXPECT_EQ(bins, 2);
  }
  EXPECT_EQ(static_cast<std::uint64_t>(dirs), r.report.violations);
}

TEST(Campaign, ReplayReproducesWitnesses) {
  const fs::path out = fresh_dir("replay");
  CampaignConfig c = quick("target-func", 0.3);
  c.out_dir = out.string();
  run_campaign(c);
  const fs::path first = fs::directory_iterator(out / "violations")->path();
  auto backend = make_backend(c);
  const auto runs = replay(*backend, first.string());
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_NE(runs[0].output, runs[1].output);
  for (const auto& run : runs) {
    // Witness files are named after the output they produced.
    EXPECT_EQ(fs::path(run.path).stem().string(), run.output.hash().hex());
  }
}

TEST(Campaign, ReportFromSnapshotMatches) {
  const fs::path out = fresh_dir("snapshot");
  CampaignConfig c = quick("target-func", 0.3);
  c.out_dir = out.string();
  const CampaignResult r = run_campaign(c);
  const QifReport again = report_from_snapshot((out / "state_snapshot.json").string(), std::nullopt);
  EXPECT_EQ(to_json(again), to_json(r.report));
  const QifReport loose = report_from_snapshot((out / "state_snapshot.json").string(), 1);
  EXPECT_GE(loose.unique_public_inputs, r.report.unique_public_inputs);
  EXPECT_THROW(report_from_snapshot((out / "missing.json").string(), std::nullopt), ConfigError);
}

TEST(Campaign, SeedsLoadedAndCoerced) {
  const fs::path dir = fresh_dir("seeds");
  fs::create_directories(dir);
  StructuredInput s;
  s.public_part = {4};
  s.explicit_secret = Bytes{1};
  s.heap_secret = Bytes{9};
  write_input_file((dir / "b.bin").string(), s);
  StructuredInput t;
  t.public_part = {8};
  write_input_file((dir / "a.bin").string(), t);
  const auto seeds = load_seeds(dir.string(), PartSet::parse("explicit"));
  ASSERT_EQ(seeds.size(), 2u);
  EXPECT_EQ(seeds[0].public_part, Bytes{8});  // sorted by name
  EXPECT_EQ(seeds[0].explicit_secret, Bytes(16, 0));
  EXPECT_EQ(seeds[1].explicit_secret, Bytes{1});
  EXPECT_FALSE(seeds[1].heap_secret.has_value());

  std::ofstream(dir / "c.bin") << "garbage";
  EXPECT_THROW(load_seeds(dir.string(), PartSet::parse("explicit")), ConfigError);
}

TEST(Campaign, BuiltinSeedShape) {
  const StructuredInput s = builtin_seed(PartSet::parse("stack,heap"));
  EXPECT_EQ(s.public_part, Bytes(16, 0));
  EXPECT_FALSE(s.explicit_secret.has_value());
  EXPECT_EQ(s.stack_secret, Bytes(16, 0));
  EXPECT_EQ(s.heap_secret, Bytes(16, 0));
}

TEST(Campaign, ConfigErrors) {
  CampaignConfig c;
  EXPECT_THROW(validate(c), ConfigError);
  c = quick("no-such-target", 1);
  EXPECT_THROW(run_campaign(c), ConfigError);
  c = quick("constant", 0);
  EXPECT_THROW(validate(c), ConfigError);
  c = quick("constant", 1);
  c.map_size = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = quick("constant", 1);
  c.seeds_dir = "/nonexistent/seeds";
  EXPECT_THROW(validate(c), ConfigError);
  c.seeds_dir.clear();
  c.target = "/nonexistent/binary";
  EXPECT_THROW(make_backend(c), ConfigError);
}

TEST(Campaign, PartsFollowTarget) {
  CampaignConfig c = quick("stack-probe-8", 1);
  EXPECT_EQ(resolve_parts(c), PartSet::parse("stack"));
  c.parts = PartSet::parse("heap");
  EXPECT_EQ(resolve_parts(c), PartSet::parse("heap"));
}

TEST(Campaign, MemoryBudgetStopsWithArtifacts) {
  const fs::path out = fresh_dir("memory");
  CampaignConfig c = quick("target-func", 5.0);
  c.memory_budget_mb = 1;  // below any realistic resident set
  c.out_dir = out.string();
  const CampaignResult r = run_campaign(c);
  EXPECT_EQ(r.stop_reason, StopReason::kMemoryBudget);
  EXPECT_FALSE(r.diagnostic.empty());
  EXPECT_TRUE(fs::exists(out / "report.json"));
}

TEST(Campaign, ResidentSetIsReported) { EXPECT_GT(current_rss_bytes(), 0u); }

}  // namespace
}  // namespace nifuzz
