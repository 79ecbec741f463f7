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

#include "core/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace nifuzz {
namespace {

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

nlohmann::json to_json(const QifReport& r) {
  return {{"cmi_bits", r.cmi_bits},
          {"capacity_lower_bound_bits", r.capacity_lower_bound_bits},
          {"direct_mapped_bits",
           {{"explicit", r.direct(SecretPartId::kExplicit)},
            {"stack", r.direct(SecretPartId::kStack)},
            {"heap", r.direct(SecretPartId::kHeap)}}},
          {"violations", r.violations},
          {"unique_public_inputs", r.unique_public_inputs},
          {"executions", r.executions},
          {"seconds", r.seconds}};
}

QifReport qif_report_from_json(const nlohmann::json& j) {
  try {
    QifReport r;
    r.cmi_bits = j.at("cmi_bits").get<double>();
    r.capacity_lower_bound_bits = j.at("capacity_lower_bound_bits").get<double>();
    const auto& d = j.at("direct_mapped_bits");
    r.direct_mapped_bits = {d.at("explicit").get<std::uint64_t>(),
                            d.at("stack").get<std::uint64_t>(),
                            d.at("heap").get<std::uint64_t>()};
    r.violations = j.at("violations").get<std::uint64_t>();
    r.unique_public_inputs = j.at("unique_public_inputs").get<std::uint64_t>();
    r.executions = j.at("executions").get<std::uint64_t>();
    r.seconds = j.at("seconds").get<double>();
    return r;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed report: ") + ex.what());
  }
}

std::uint64_t count_unique_public_inputs(const FuzzerState& state, std::uint64_t min_hits) {
  std::uint64_t n = 0;
  for (const auto& [_, v] : state.map) {
    if (v.hits >= min_hits) ++n;
  }
  return n;
}

double estimate_cmi(const FuzzerState& state, std::uint64_t min_hits) {
  if (state.violations.empty()) return 0.0;
  const std::uint64_t unique = count_unique_public_inputs(state, min_hits);
  if (unique == 0) return 0.0;
  const double p_v = 1.0 / static_cast<double>(unique);

  double sum_outputs = 0.0;
  double sum_violations = 0.0;
  for (const Violation& viol : state.violations) {
    const IOHashValue* v = state.find(viol.public_hash);
    if (v == nullptr) continue;
    std::uint64_t samples = 0;
    for (const auto& [h, list] : v->uniform_pub_outs_to_sec_ins) {
      if (!v->unstable_outputs.contains(h)) samples += list.size();
    }
    if (samples == 0) continue;
    const double n = static_cast<double>(samples);
    sum_violations += plogp(p_v);
    for (const auto& [h, list] : v->uniform_pub_outs_to_sec_ins) {
      if (v->unstable_outputs.contains(h)) continue;
      sum_outputs += plogp(p_v * static_cast<double>(list.size()) / n);
    }
    for (const auto& [h, _] : v->non_uniform_pub_outs_to_sec_ins) {
      if (v->uniform_pub_outs_to_sec_ins.contains(h) || v->unstable_outputs.contains(h)) continue;
      sum_outputs += plogp(p_v / n);
    }
  }
  return std::max(0.0, -sum_outputs + sum_violations);
}

double capacity_lower_bound(const FuzzerState& state) {
  std::size_t most = 0;
  for (const Violation& viol : state.violations) {
    if (const IOHashValue* v = state.find(viol.public_hash)) {
      most = std::max(most, v->distinct_outputs());
    }
  }
  return most == 0 ? 0.0 : std::log2(static_cast<double>(most));
}

std::array<std::uint64_t, 3> max_direct_mapped_bits(const FuzzerState& state) {
  std::array<std::uint64_t, 3> best{};
  for (const Violation& viol : state.violations) {
    const IOHashValue* v = state.find(viol.public_hash);
    if (v == nullptr || !v->bitflip_map) continue;
    std::array<std::uint64_t, 3> counts{};
    for (const auto& [coord, _] : *v->bitflip_map) ++counts[static_cast<std::size_t>(coord.part)];
    for (std::size_t i = 0; i < 3; ++i) best[i] = std::max(best[i], counts[i]);
  }
  return best;
}

QifReport compute_report(const FuzzerState& state, std::uint64_t min_hits) {
  QifReport r;
  r.cmi_bits = estimate_cmi(state, min_hits);
  r.capacity_lower_bound_bits = capacity_lower_bound(state);
  r.direct_mapped_bits = max_direct_mapped_bits(state);
  r.violations = state.violations.size();
  r.unique_public_inputs = count_unique_public_inputs(state, min_hits);
  return r;
}

}  // namespace nifuzz
