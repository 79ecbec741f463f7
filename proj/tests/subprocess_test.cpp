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


#include <sys/stat.h>

#include <chrono>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "core/errors.hpp"
#include "core/subprocess.hpp"

namespace nifuzz {
namespace {

using namespace std::chrono_literals;

StructuredInput with(std::string pub, Bytes secret) {
  StructuredInput in;
  in.public_part.assign(pub.begin(), pub.end());
  in.explicit_secret = std::move(secret);
  return in;
}

TEST(Subprocess, EchoesPublicAndSecret) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 4096);
  const ExecutionResult r = b.run(with("ab", {0x01, 0xFF}));
  EXPECT_EQ(r.exit_kind, ExitKind::kNormal);
  EXPECT_EQ(r.output.stdout_bytes, (Bytes{'a', 'b', 0x01, 0xFF}));
  EXPECT_TRUE(r.output.stderr_bytes.empty());
  EXPECT_EQ(b.executions(), 1u);
}

TEST(Subprocess, StderrCaptured) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 4096);
  const ExecutionResult r = b.run(with("E", {7, 8}));
  EXPECT_TRUE(r.output.stdout_bytes.empty());
  EXPECT_EQ(r.output.stderr_bytes, (Bytes{7, 8}));
}

TEST(Subprocess, CoverageReadFromSharedMap) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 4096);
  const ExecutionResult r = b.run(with("AA", {0}));
  EXPECT_EQ(r.coverage.size(), 4096u);
  EXPECT_EQ(r.coverage[1], 1);
  EXPECT_EQ(r.coverage[16 + 'A'], 2);
  // Map is cleared between runs.
  const ExecutionResult again = b.run(with("B", {0}));
  EXPECT_EQ(again.coverage[16 + 'A'], 0);
  EXPECT_EQ(again.coverage[16 + 'B'], 1);
}

TEST(Subprocess, CountersWrapModuloMapSize) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 128);
  const ExecutionResult r = b.run(with("W", {}));
  EXPECT_EQ(r.coverage.size(), 128u);
  EXPECT_EQ(r.coverage[3], 1);
}

TEST(Subprocess, TimeoutKillsTarget) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 200ms, 4096);
  const auto start = std::chrono::steady_clock::now();
  const ExecutionResult r = b.run(with("T", {}));
  EXPECT_EQ(r.exit_kind, ExitKind::kTimeout);
  EXPECT_LT(std::chrono::steady_clock::now() - start, 5s);
}

TEST(Subprocess, CrashReported) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 4096);
  EXPECT_EQ(b.run(with("C", {})).exit_kind, ExitKind::kCrash);
}

TEST(Subprocess, NondeterministicTargetIsUnstable) {
  SubprocessBackend b(NIFUZZ_FIXTURE_PATH, 2000ms, 4096);
  EXPECT_FALSE(check_stability(b, with("N", {}), 2).has_value());
  EXPECT_TRUE(check_stability(b, with("x", {1}), 3).has_value());
}

TEST(Subprocess, MissingExecutableIsConfigError) {
  EXPECT_THROW(SubprocessBackend("/nonexistent/target", 1000ms), ConfigError);
}

TEST(Subprocess, NonExecutableFileIsConfigError) {
  const auto path = std::filesystem::temp_directory_path() / "nifuzz_not_exec.txt";
  std::ofstream(path) << "data";
  ::chmod(path.c_str(), 0644);
  EXPECT_THROW(SubprocessBackend(path.string(), 1000ms), ConfigError);
  std::filesystem::remove(path);
}

TEST(Subprocess, SpawnFailureIsTargetError) {
  const auto path = std::filesystem::temp_directory_path() / "nifuzz_bad_interp.sh";
  std::ofstream(path) << "#!/nonexistent/interpreter\n";
  ::chmod(path.c_str(), 0755);
  SubprocessBackend b(path.string(), 1000ms, 4096);
  EXPECT_THROW(b.run(with("x", {})), TargetError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace nifuzz
