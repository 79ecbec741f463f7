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

// Leakage metrics computed from fuzzer state. All are pure functions of the
// state; logarithms are base 2 with 0 log 0 = 0.

#ifndef NIFUZZ_CORE_ESTIMATORS_HPP_
#define NIFUZZ_CORE_ESTIMATORS_HPP_

#include <array>
#include <cstdint>

#include "core/state.hpp"
#include "json.hpp"

namespace nifuzz {

inline constexpr std::uint64_t kDefaultMinHits = 8;

struct QifReport {
  double cmi_bits = 0.0;
  double capacity_lower_bound_bits = 0.0;
  // Indexed by SecretPartId.
  std::array<std::uint64_t, 3> direct_mapped_bits{};
  std::uint64_t violations = 0;
  std::uint64_t unique_public_inputs = 0;
  std::uint64_t executions = 0;
  double seconds = 0.0;

  std::uint64_t direct(SecretPartId part) const {
    return direct_mapped_bits[static_cast<std::size_t>(part)];
  }
};

nlohmann::json to_json(const QifReport& report);
QifReport qif_report_from_json(const nlohmann::json& j);

// Public inputs with at least `min_hits` executions.
std::uint64_t count_unique_public_inputs(const FuzzerState& state, std::uint64_t min_hits);

// -sum p(o,v) log p(o,v) + sum p(v) log p(v) over violations, with
// p(v) = 1 / unique public inputs and p(o,v) = p(v) * (uniform count / uniform
// samples); outputs seen only outside uniform sampling count once. Violations
// without uniform samples are skipped.
double estimate_cmi(const FuzzerState& state, std::uint64_t min_hits = kDefaultMinHits);

// log2 of the most distinct outputs seen for any violation.
double capacity_lower_bound(const FuzzerState& state);

// Per part, most bit-map entries of any violation.
std::array<std::uint64_t, 3> max_direct_mapped_bits(const FuzzerState& state);

// Everything except executions and seconds.
QifReport compute_report(const FuzzerState& state, std::uint64_t min_hits = kDefaultMinHits);

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_ESTIMATORS_HPP_
