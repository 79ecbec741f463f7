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

// Execution of the system under test. Two backends share one interface:
// InProcessBackend calls a registered C++ function, SubprocessBackend spawns
// a native executable per execution (see subprocess.hpp).

#ifndef NIFUZZ_CORE_EXECUTOR_HPP_
#define NIFUZZ_CORE_EXECUTOR_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/hash.hpp"
#include "core/input.hpp"

namespace nifuzz {

inline constexpr std::size_t kDefaultMapSize = 65536;
inline constexpr std::size_t kDefaultOutputCap = std::size_t{1} << 20;

// Public observation of one execution. Equality covers both streams.
struct OutputData {
  Bytes stdout_bytes;
  Bytes stderr_bytes;

  Hash128 hash() const;
  std::size_t bit_length() const { return 8 * (stdout_bytes.size() + stderr_bytes.size()); }
  // Bit i of stdout||stderr, numbered like input parts.
  bool bit(std::size_t i) const;

  friend bool operator==(const OutputData&, const OutputData&) = default;
};

struct BitDiff {
  std::vector<std::size_t> flipped;  // ascending
  bool length_mismatch = false;
};

// Output bit positions that differ, compared up to the shorter length.
BitDiff find_flipped_bits(const OutputData& before, const OutputData& after);

// Edge hit counters. Stored sparsely; reads behave like a fixed-length byte
// array of size() entries.
class CoverageMap {
 public:
  explicit CoverageMap(std::size_t size = kDefaultMapSize) : size_(size) {}

  std::size_t size() const { return size_; }
  std::uint8_t operator[](std::size_t index) const;
  bool all_zero() const { return entries_.empty(); }
  // (index, count) for every non-zero counter, ascending by index.
  const std::vector<std::pair<std::uint32_t, std::uint8_t>>& nonzero() const {
    return entries_;
  }

  static CoverageMap from_dense(std::span<const std::uint8_t> counters);

  class Builder {
   public:
    explicit Builder(std::size_t size) : size_(size) {}
    void hit(std::uint64_t edge_id);  // saturating, wraps modulo size
    CoverageMap build();
    void clear() { hits_.clear(); }

   private:
    std::size_t size_;
    std::vector<std::uint32_t> hits_;
  };

 private:
  std::size_t size_;
  std::vector<std::pair<std::uint32_t, std::uint8_t>> entries_;
};

enum class ExitKind : std::uint8_t { kNormal, kCrash, kTimeout };
std::string_view exit_kind_name(ExitKind kind);

struct ExecutionResult {
  OutputData output;
  CoverageMap coverage;
  ExitKind exit_kind = ExitKind::kNormal;
  bool output_truncated = false;
};

class TargetBackend {
 public:
  virtual ~TargetBackend() = default;

  ExecutionResult run(const StructuredInput& input) {
    ++executions_;
    return do_run(input);
  }

  std::uint64_t executions() const { return executions_; }
  virtual std::size_t map_size() const = 0;
  virtual std::string description() const = 0;

 protected:
  virtual ExecutionResult do_run(const StructuredInput& input) = 0;

 private:
  std::uint64_t executions_ = 0;
};

// Handed to in-process targets for the duration of one call.
class TargetContext {
 public:
  TargetContext(const StructuredInput& input, std::size_t output_cap,
                CoverageMap::Builder& coverage)
      : input_(input), output_cap_(output_cap), coverage_(coverage) {}

  const StructuredInput& input() const { return input_; }
  std::span<const std::uint8_t> public_part() const { return input_.public_part; }
  // Absent parts yield an empty span; use has_secret to distinguish.
  std::span<const std::uint8_t> secret(SecretPartId part) const;
  bool has_secret(SecretPartId part) const { return input_.secret(part).has_value(); }

  void write_stdout(std::span<const std::uint8_t> data);
  void write_stderr(std::span<const std::uint8_t> data);
  void print(std::string_view text);
  // Abstract branch ids are hashed into map slots.
  void hit(std::uint64_t branch_id);

  // Simulated uninitialised memory: `n` bytes of a region painted with the
  // stack (or heap) secret repeated, starting `offset` bytes into the
  // region. Without the part the region reads as zero.
  Bytes uninit_stack(std::size_t n, std::size_t offset = 0) const;
  Bytes uninit_heap(std::size_t n, std::size_t offset = 0) const;

  OutputData take_output() { return std::move(output_); }
  bool truncated() const { return truncated_; }

 private:
  void append(Bytes& stream, std::span<const std::uint8_t> data);

  const StructuredInput& input_;
  std::size_t output_cap_;
  CoverageMap::Builder& coverage_;
  OutputData output_;
  bool truncated_ = false;
};

using InProcessFn = std::function<void(TargetContext&)>;

class InProcessBackend final : public TargetBackend {
 public:
  explicit InProcessBackend(InProcessFn fn, std::string name = "inproc",
                            std::size_t map_size = kDefaultMapSize,
                            std::size_t output_cap = kDefaultOutputCap);

  std::size_t map_size() const override { return map_size_; }
  std::string description() const override { return "inproc:" + name_; }

 protected:
  ExecutionResult do_run(const StructuredInput& input) override;

 private:
  InProcessFn fn_;
  std::string name_;
  std::size_t map_size_;
  std::size_t output_cap_;
  CoverageMap::Builder coverage_;
};

// Runs the input k times; yields the output only if all k runs agree
// byte-for-byte.
std::optional<OutputData> check_stability(TargetBackend& backend,
                                          const StructuredInput& input, int k);

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_EXECUTOR_HPP_
