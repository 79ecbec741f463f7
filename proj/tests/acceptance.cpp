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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance            run everything
//   acceptance <name>...  run the named criteria only

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/campaign.hpp"
#include "core/estimators.hpp"
#include "core/exploit.hpp"
#include "core/targets.hpp"

namespace nifuzz {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

InProcessBackend backend_for(const std::string& name) {
  return InProcessBackend(find_target(name)->make(), name);
}

// ---- worked example --------------------------------------------------------

Outcome worked_example() {
  const auto start = Clock::now();
  auto backend = backend_for("and-mask");
  StructuredInput in;
  in.public_part = {0};
  in.explicit_secret = Bytes{0};
  InfluenceSet infl;
  for (std::size_t i = 0; i < 8; ++i) infl.coords.push_back({SecretPartId::kExplicit, i});

  const BitflipMap expected{{{SecretPartId::kExplicit, 3}, {3}},
                            {{SecretPartId::kExplicit, 6}, {6}}};
  const bool original_zero = backend.run(in).output.stdout_bytes == Bytes{0};
  const BitflipMap slow = bitflip_map_slow(backend, in, infl);
  std::vector<FastRound> trace;
  const BitflipMap fast = bitflip_map_fast(backend, in, infl, {}, &trace);

  const std::uint8_t inputs[] = {0b10101010, 0b11001100, 0b11110000};
  const std::vector<std::size_t> flips[] = {{3}, {3, 6}, {6}};
  bool table = trace.size() == 3;
  for (std::size_t r = 0; table && r < 3; ++r) {
    table = trace[r].mutated_input.explicit_secret == Bytes{inputs[r]} &&
            trace[r].output_flips == flips[r];
  }
  const double secs = seconds_since(start);
  const bool pass = original_zero && slow == expected && fast == expected && table && secs < 1.0;
  return {pass, std::string("slow ") + (slow == expected ? "ok" : "wrong") + ", fast " +
                    (fast == expected ? "ok" : "wrong") + ", trace " + (table ? "ok" : "wrong") +
                    ", " + fmt("%.4f s", secs)};
}

// ---- CMI oracle ---------------------------------------------------------------

// Brute force over a finite channel: pub -> secret -> output table, public
// and secret uniform and independent. Returns H(O | P).
double brute_force_cmi(const std::vector<std::vector<int>>& table) {
  const double pp = 1.0 / static_cast<double>(table.size());
  // Joint p(p, o) and marginal p(p); H(O|P) = -sum p(p,o) log p(o|p).
  double h = 0.0;
  for (const auto& row : table) {
    std::map<int, double> joint;
    for (int o : row) joint[o] += pp / static_cast<double>(row.size());
    for (const auto& [_, p_po] : joint) h -= p_po * std::log2(p_po / pp);
  }
  return h;
}

FuzzerState exhaustive_state(const std::vector<std::vector<int>>& table) {
  FuzzerState state;
  for (std::size_t p = 0; p < table.size(); ++p) {
    for (std::size_t s = 0; s < table[p].size(); ++s) {
      StructuredInput in;
      in.public_part = {static_cast<std::uint8_t>(p)};
      in.explicit_secret = Bytes{static_cast<std::uint8_t>(s)};
      ExecutionResult r;
      r.output.stdout_bytes = {static_cast<std::uint8_t>(table[p][s])};
      state.record_execution(in, r, Phase::kUniform);
    }
    StructuredInput pub;
    pub.public_part = {static_cast<std::uint8_t>(p)};
    const Hash128 h = public_hash(pub);
    if (state.find(h)->distinct_outputs() >= 2) {
      state.add_violation(Violation{h, {}, {}, {}, {}, {}, 0});
    }
  }
  return state;
}

Outcome cmi_oracle() {
  const auto start = Clock::now();
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t pubs = std::size_t{1} << (1 + rng() % 6);
    const std::size_t secrets = std::size_t{1} << (1 + rng() % 6);
    std::vector<std::vector<int>> table(pubs, std::vector<int>(secrets));
    for (auto& row : table) {
      // Each public gets its own output alphabet size, 1 meaning no leak.
      const int alphabet = 1 + static_cast<int>(rng() % 6);
      for (auto& o : row) o = static_cast<int>(rng() % alphabet);
    }
    const double oracle = brute_force_cmi(table);
    const double est = estimate_cmi(exhaustive_state(table), 1);
    worst = std::max(worst, std::abs(oracle - est));
  }
  std::vector<std::vector<int>> tf(256, std::vector<int>(256));
  for (int low = 0; low < 256; ++low) {
    for (int high = 0; high < 256; ++high) tf[low][high] = low % 4 == 0 ? high % 4 : low % 4;
  }
  const double tf_cmi = estimate_cmi(exhaustive_state(tf), 1);
  const double secs = seconds_since(start);
  const bool pass = worst <= 1e-9 && std::abs(tf_cmi - 0.5) <= 1e-12 && secs < 30.0;
  return {pass, fmt("max |estimate - oracle| %.3g bits over 50 targets", worst) +
                    fmt(", target_func %.12f bits", tf_cmi) + fmt(", %.1f s", secs)};
}

// ---- campaigns ------------------------------------------------------------------

struct RunResult {
  CampaignResult result;
  double wall = 0.0;
  std::vector<QifReport> series;
};

RunResult run(CampaignConfig config, const std::function<bool(const QifReport&)>& done = {}) {
  RunResult out;
  CampaignHooks hooks;
  hooks.on_stats = [&](const QifReport& r) {
    out.series.push_back(r);
    return done && done(r);
  };
  const auto start = Clock::now();
  out.result = run_campaign(config, hooks);
  out.wall = seconds_since(start);
  return out;
}

CampaignConfig wall_clock(const std::string& target, double secs) {
  CampaignConfig c;
  c.target = "inproc:" + target;
  c.budget_secs = secs;
  c.stats_interval_secs = 1.0;
  return c;
}

Outcome capacity() {
  const RunResult two = run(wall_clock("target-func", 60),
                            [](const QifReport& r) { return r.capacity_lower_bound_bits >= 2.0; });
  const RunResult eight = run(wall_clock("stack-probe-8", 60),
                              [](const QifReport& r) { return r.capacity_lower_bound_bits >= 8.0; });
  const double a = two.result.report.capacity_lower_bound_bits;
  const double b = eight.result.report.capacity_lower_bound_bits;
  return {a == 2.0 && b == 8.0,
          fmt("target-func %.3f bits", a) + fmt(" in %.2f s", two.wall) +
              fmt(", stack-probe-8 %.3f bits", b) + fmt(" in %.2f s", eight.wall)};
}

Outcome direct_mapping() {
  struct Case {
    const char* target;
    SecretPartId part;
    std::uint64_t expected;
  };
  const Case cases[] = {{"explicit-701-bit", SecretPartId::kExplicit, 701},
                        {"stack-2048-bit", SecretPartId::kStack, 2048},
                        {"heap-1024-bit", SecretPartId::kHeap, 1024}};
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const RunResult r = run(wall_clock(c.target, 600), [&](const QifReport& q) {
      return q.direct(c.part) >= c.expected;
    });
    const std::uint64_t got = r.result.report.direct(c.part);
    pass = pass && got == c.expected;
    if (!detail.empty()) detail += ", ";
    detail += std::string(c.target) + " " + std::to_string(got) + fmt(" in %.1f s", r.wall);
  }
  return {pass, detail};
}

Outcome cmi_convergence() {
  constexpr double kTrue = 0.0000266;
  CampaignConfig c = wall_clock("sparse-leak", 3600);
  c.force_uniform_public = true;
  c.min_hits = 3;
  c.max_execs = 20'000'000;
  c.rng_seed = 1;
  const RunResult r = run(c);
  const QifReport& f = r.result.report;

  // Spike decay: compare the worst over-estimate in the first quarter of
  // the series (once a violation exists) with the last quarter.
  std::vector<double> cmi;
  for (const QifReport& q : r.series) {
    if (q.violations > 0) cmi.push_back(q.cmi_bits);
  }
  double early = 0.0;
  double late = 0.0;
  const std::size_t quarter = cmi.size() / 4;
  for (std::size_t i = 0; i < quarter; ++i) early = std::max(early, cmi[i]);
  for (std::size_t i = cmi.size() - quarter; i < cmi.size(); ++i) late = std::max(late, cmi[i]);
  const bool band = f.cmi_bits >= 0.5 * kTrue && f.cmi_bits <= 2.0 * kTrue;
  const bool late_in_band = late <= 2.0 * kTrue;
  const bool decay = quarter > 0 && early > late;
  const bool pass = f.executions >= 10'000'000 && band && late_in_band && decay && r.wall <= 3600;
  return {pass, fmt("cmi %.3g bits", f.cmi_bits) + fmt(" (%.2fx true)", f.cmi_bits / kTrue) +
                    " after " + std::to_string(f.executions) + " executions" +
                    fmt(", early peak %.3g", early) + fmt(", late peak %.3g", late) + ", " +
                    std::to_string(cmi.size()) + " stats lines" + fmt(", %.0f s", r.wall)};
}

Outcome caveat() {
  CampaignConfig c = wall_clock("caveat", 10);
  const RunResult r = run(c);
  auto backend = backend_for("caveat");
  std::set<Bytes> outputs;
  for (int s = 0; s < 256; ++s) {
    StructuredInput in;
    in.public_part = {0};
    in.explicit_secret = Bytes{static_cast<std::uint8_t>(s)};
    outputs.insert(backend.run(in).output.stdout_bytes);
  }
  const std::uint64_t direct = r.result.report.direct(SecretPartId::kExplicit);
  const double cap = r.result.report.capacity_lower_bound_bits;
  const bool pass = direct == 2 && outputs.size() == 5 && std::abs(cap - std::log2(5.0)) < 1e-12;
  return {pass, "direct " + std::to_string(direct) + ", exhaustive outputs " +
                    std::to_string(outputs.size()) + fmt(", capacity %.4f bits", cap)};
}

Outcome soundness() {
  const char* targets[] = {"constant", "echo-public", "public-branches", "masked-secret",
                           "init-struct", "heap-init"};
  bool pass = true;
  std::string detail;
  for (const char* t : targets) {
    CampaignConfig c;
    c.target = std::string("inproc:") + t;
    c.budget_secs = 1e9;
    c.virtual_clock = true;
    c.max_execs = 1'000'000;
    const RunResult r = run(c);
    const QifReport& q = r.result.report;
    const bool ok = q.executions >= 1'000'000 && q.violations == 0 && q.cmi_bits == 0.0 &&
                    q.capacity_lower_bound_bits == 0.0;
    pass = pass && ok;
    if (!detail.empty()) detail += ", ";
    detail += std::string(t) + (ok ? " 0/0/0" : " LEAK REPORTED") + " (" +
              std::to_string(q.executions) + " execs)";
  }
  return {pass, detail};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "nifuzz_acceptance_determinism";
  fs::remove_all(base);
  CampaignConfig c;
  c.target = "inproc:target-func";
  c.budget_secs = 3;
  c.virtual_clock = true;
  c.rng_seed = 7;
  c.out_dir = (base / "a").string();
  run(c);
  c.out_dir = (base / "b").string();
  run(c);
  const std::string a = slurp(base / "a" / "report.json");
  const std::string b = slurp(base / "b" / "report.json");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " +
                                    (a == b ? "identical" : "different")};
}

}  // namespace
}  // namespace nifuzz

int main(int argc, char** argv) {
  using namespace nifuzz;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked-example-exactness", worked_example},
      {"cmi-oracle-equivalence", cmi_oracle},
      {"capacity-small-leaks", capacity},
      {"direct-mapping-bulk-leaks", direct_mapping},
      {"cmi-convergence", cmi_convergence},
      {"direct-bits-caveat", caveat},
      {"non-interference-soundness", soundness},
      {"determinism", determinism},
  };
  const std::set<std::string> only(argv + 1, argv + argc);
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && !only.contains(name)) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
