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

#include "core/executor.hpp"

#include <algorithm>
#include <stdexcept>

namespace nifuzz {

Hash128 OutputData::hash() const {
  return hash_combine(hash128(stdout_bytes, 1), hash128(stderr_bytes, 2));
}

bool OutputData::bit(std::size_t i) const {
  const std::size_t byte = i / 8;
  const std::uint8_t b = byte < stdout_bytes.size()
                             ? stdout_bytes[byte]
                             : stderr_bytes.at(byte - stdout_bytes.size());
  return (b >> (i % 8)) & 1;
}

BitDiff find_flipped_bits(const OutputData& before, const OutputData& after) {
  BitDiff diff;
  diff.length_mismatch = before.stdout_bytes.size() != after.stdout_bytes.size() ||
                         before.stderr_bytes.size() != after.stderr_bytes.size();

  auto scan = [&diff](const Bytes& a, const Bytes& b, std::size_t bit_base) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::uint8_t x = a[i] ^ b[i];
      while (x != 0) {
        const int bit = __builtin_ctz(x);
        diff.flipped.push_back(bit_base + 8 * i + static_cast<std::size_t>(bit));
        x = static_cast<std::uint8_t>(x & (x - 1));
      }
    }
  };
  scan(before.stdout_bytes, after.stdout_bytes, 0);
  scan(before.stderr_bytes, after.stderr_bytes, 8 * before.stdout_bytes.size());
  return diff;
}

std::uint8_t CoverageMap::operator[](std::size_t index) const {
  if (index >= size_) throw std::out_of_range("coverage index out of range");
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const auto& e, std::size_t idx) { return e.first < idx; });
  return it != entries_.end() && it->first == index ? it->second : 0;
}

CoverageMap CoverageMap::from_dense(std::span<const std::uint8_t> counters) {
  CoverageMap map(counters.size());
  for (std::size_t i = 0; i < counters.size(); ++i) {
    if (counters[i] != 0) map.entries_.emplace_back(static_cast<std::uint32_t>(i), counters[i]);
  }
  return map;
}

void CoverageMap::Builder::hit(std::uint64_t edge_id) {
  hits_.push_back(static_cast<std::uint32_t>(edge_id % size_));
}

CoverageMap CoverageMap::Builder::build() {
  CoverageMap map(size_);
  std::sort(hits_.begin(), hits_.end());
  for (std::size_t i = 0; i < hits_.size();) {
    std::size_t j = i;
    while (j < hits_.size() && hits_[j] == hits_[i]) ++j;
    map.entries_.emplace_back(hits_[i], static_cast<std::uint8_t>(std::min<std::size_t>(j - i, 255)));
    i = j;
  }
  hits_.clear();
  return map;
}

std::string_view exit_kind_name(ExitKind kind) {
  switch (kind) {
    case ExitKind::kNormal: return "normal";
    case ExitKind::kCrash: return "crash";
    case ExitKind::kTimeout: return "timeout";
  }
  return "unknown";
}

std::span<const std::uint8_t> TargetContext::secret(SecretPartId part) const {
  const auto& s = input_.secret(part);
  return s ? std::span<const std::uint8_t>(*s) : std::span<const std::uint8_t>{};
}

void TargetContext::append(Bytes& stream, std::span<const std::uint8_t> data) {
  const std::size_t room = output_cap_ - std::min(output_cap_, stream.size());
  if (data.size() > room) {
    truncated_ = true;
    data = data.first(room);
  }
  stream.insert(stream.end(), data.begin(), data.end());
}

void TargetContext::write_stdout(std::span<const std::uint8_t> data) {
  append(output_.stdout_bytes, data);
}

void TargetContext::write_stderr(std::span<const std::uint8_t> data) {
  append(output_.stderr_bytes, data);
}

void TargetContext::print(std::string_view text) {
  write_stdout({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

namespace {

Bytes tile(const std::optional<Bytes>& pattern, std::size_t n, std::size_t offset) {
  Bytes out(n, 0);
  if (!pattern || pattern->empty()) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (*pattern)[(offset + i) % pattern->size()];
  return out;
}

// Spreads abstract branch ids over the map.
std::uint64_t mix_branch(std::uint64_t id) {
  id ^= id >> 33;
  id *= 0xff51afd7ed558ccdULL;
  id ^= id >> 33;
  return id;
}

}  // namespace

void TargetContext::hit(std::uint64_t branch_id) { coverage_.hit(mix_branch(branch_id)); }

Bytes TargetContext::uninit_stack(std::size_t n, std::size_t offset) const {
  return tile(input_.stack_secret, n, offset);
}

Bytes TargetContext::uninit_heap(std::size_t n, std::size_t offset) const {
  return tile(input_.heap_secret, n, offset);
}

InProcessBackend::InProcessBackend(InProcessFn fn, std::string name, std::size_t map_size,
                                   std::size_t output_cap)
    : fn_(std::move(fn)),
      name_(std::move(name)),
      map_size_(map_size),
      output_cap_(output_cap),
      coverage_(map_size) {
  if (!fn_) throw std::invalid_argument("in-process target function is empty");
  if (map_size_ == 0) throw std::invalid_argument("map size must be positive");
}

ExecutionResult InProcessBackend::do_run(const StructuredInput& input) {
  coverage_.clear();
  TargetContext ctx(input, output_cap_, coverage_);
  fn_(ctx);
  const bool truncated = ctx.truncated();
  return ExecutionResult{ctx.take_output(), coverage_.build(), ExitKind::kNormal, truncated};
}

std::optional<OutputData> check_stability(TargetBackend& backend, const StructuredInput& input,
                                          int k) {
  if (k < 2) throw std::invalid_argument("check_stability needs k >= 2");
  std::optional<OutputData> first;
  for (int i = 0; i < k; ++i) {
    ExecutionResult r = backend.run(input);
    if (!first) {
      first = std::move(r.output);
    } else if (r.output != *first) {
      return std::nullopt;
    }
  }
  return first;
}

}  // namespace nifuzz
