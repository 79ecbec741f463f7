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

#include "core/state.hpp"

#include <algorithm>
#include <bit>

#include "core/errors.hpp"

namespace nifuzz {
namespace {

constexpr int kConfirmRuns = 3;
constexpr const char* kSnapshotFormat = "nifuzz-state-snapshot";
constexpr int kSnapshotVersion = 1;

// AFL hit-count classes: 1, 2, 3, 4-7, 8-15, 16-31, 32-127, 128+.
std::uint8_t bucket_bit(std::uint8_t count) {
  if (count <= 3) return static_cast<std::uint8_t>(1u << (count - 1));
  if (count < 8) return 1u << 3;
  if (count < 16) return 1u << 4;
  if (count < 32) return 1u << 5;
  if (count < 128) return 1u << 6;
  return 1u << 7;
}

StructuredInput strip_public(const StructuredInput& input) {
  StructuredInput s = input;
  s.public_part.clear();
  return s;
}

StructuredInput with_public(StructuredInput s, const Bytes& pub) {
  s.public_part = pub;
  return s;
}

nlohmann::json output_counts(const OutputMap& m) {
  // Sorted keys so snapshots are byte-stable.
  std::map<std::string, std::uint64_t> sorted;
  for (const auto& [h, list] : m) sorted.emplace(h.hex(), list.size());
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : sorted) j[k] = v;
  return j;
}

OutputMap output_counts_from_json(const nlohmann::json& j) {
  OutputMap m;
  for (const auto& [k, v] : j.items()) {
    auto h = Hash128::from_hex(k);
    if (!h) throw FormatError("snapshot: bad output hash '" + k + "'");
    m.emplace(*h, SecretHashList::with_count(v.get<std::uint64_t>()));
  }
  return m;
}

Hash128 hash_from_json(const nlohmann::json& j) {
  auto h = Hash128::from_hex(j.get<std::string>());
  if (!h) throw FormatError("snapshot: bad hash '" + j.get<std::string>() + "'");
  return *h;
}

}  // namespace

std::string bytes_to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xF]);
  }
  return s;
}

Bytes bytes_from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw FormatError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError(std::string("bad hex digit '") + c + "'");
  };
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
  }
  return out;
}

nlohmann::json bitflip_map_to_json(const BitflipMap& map) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [coord, outs] : map) {
    arr.push_back({{"part", std::string(part_name(coord.part))},
                   {"input_bit", coord.bit_index},
                   {"output_bits", std::vector<std::size_t>(outs.begin(), outs.end())}});
  }
  return arr;
}

BitflipMap bitflip_map_from_json(const nlohmann::json& j) {
  BitflipMap map;
  for (const auto& e : j) {
    auto part = part_from_name(e.at("part").get<std::string>());
    if (!part) throw FormatError("bitflip map: unknown part");
    auto bits = e.at("output_bits").get<std::vector<std::size_t>>();
    map[{*part, e.at("input_bit").get<std::size_t>()}] = {bits.begin(), bits.end()};
  }
  return map;
}

bool IOHashValue::has_output(const Hash128& out) const {
  return uniform_pub_outs_to_sec_ins.contains(out) ||
         non_uniform_pub_outs_to_sec_ins.contains(out);
}

std::size_t IOHashValue::distinct_outputs() const {
  std::size_t n = 0;
  for (const auto& [h, _] : non_uniform_pub_outs_to_sec_ins) {
    if (!unstable_outputs.contains(h)) ++n;
  }
  for (const auto& [h, _] : uniform_pub_outs_to_sec_ins) {
    if (!non_uniform_pub_outs_to_sec_ins.contains(h) && !unstable_outputs.contains(h)) ++n;
  }
  return n;
}

std::vector<Hash128> IOHashValue::output_keys() const {
  std::vector<Hash128> keys;
  for (const auto& [h, _] : non_uniform_pub_outs_to_sec_ins) {
    if (!unstable_outputs.contains(h)) keys.push_back(h);
  }
  for (const auto& [h, _] : uniform_pub_outs_to_sec_ins) {
    if (!non_uniform_pub_outs_to_sec_ins.contains(h) && !unstable_outputs.contains(h)) {
      keys.push_back(h);
    }
  }
  return keys;
}

bool CoverageAccumulator::merge(const CoverageMap& map) {
  if (seen_.size() < map.size()) seen_.resize(map.size(), 0);
  bool fresh = false;
  for (const auto& [index, count] : map.nonzero()) {
    const std::uint8_t bit = bucket_bit(count);
    std::uint8_t& slot = seen_[index];
    if ((slot & bit) == 0) {
      if (slot == 0) ++edges_;
      slot |= bit;
      fresh = true;
    }
  }
  return fresh;
}

RecordOutcome FuzzerState::record_execution(const StructuredInput& input,
                                            const ExecutionResult& result, Phase phase) {
  RecordOutcome outcome;
  outcome.public_hash = public_hash(input);
  outcome.output_hash = result.output.hash();
  outcome.new_coverage = coverage.merge(result.coverage);

  auto [it, inserted] = map.try_emplace(outcome.public_hash);
  IOHashValue& v = it->second;
  if (inserted) {
    v.representative_public_input = input.public_part;
    public_order.push_back(outcome.public_hash);
  }
  outcome.first_output_for_public = inserted;

  const bool seen = v.has_output(outcome.output_hash);
  outcome.new_distinct_output = !seen;

  ++v.hits;
  const std::uint64_t sh = secret_hash(input).lo;
  OutputMap& target = phase == Phase::kUniform ? v.uniform_pub_outs_to_sec_ins
                                               : v.non_uniform_pub_outs_to_sec_ins;
  target[outcome.output_hash].push(sh);

  if (!seen && phase == Phase::kNonUniform) {
    v.secret_input_for_public_output.emplace(outcome.output_hash, strip_public(input));
  }

  if (!seen && !inserted && !is_violation(outcome.public_hash) &&
      !v.unstable_outputs.contains(outcome.output_hash)) {
    // Pair with any other stable output that has a replayable witness.
    for (const auto& [h, secret] : v.secret_input_for_public_output) {
      if (h == outcome.output_hash || v.unstable_outputs.contains(h)) continue;
      outcome.candidate = WitnessPair{with_public(secret, input.public_part), h, input,
                                      outcome.output_hash};
      break;
    }
  }
  return outcome;
}

bool FuzzerState::confirm_violation(TargetBackend& backend, const Hash128& pub,
                                    const WitnessPair& witnesses) {
  if (is_violation(pub)) return true;
  if (witnesses.first.public_part != witnesses.second.public_part) {
    throw PreconditionError("witness pair must share the public part");
  }
  const auto a = check_stability(backend, witnesses.first, kConfirmRuns);
  const auto b = check_stability(backend, witnesses.second, kConfirmRuns);
  IOHashValue& v = at(pub);
  if (a && b && *a != *b) {
    // Map the witness carrying more secret bits.
    const auto secret_bytes = [](const StructuredInput& in) {
      std::size_t n = 0;
      for (SecretPartId p : kAllSecretParts) n += in.secret(p) ? in.secret(p)->size() : 0;
      return n;
    };
    const StructuredInput& exploit = secret_bytes(witnesses.second) > secret_bytes(witnesses.first)
                                         ? witnesses.second
                                         : witnesses.first;
    add_violation(Violation{pub, witnesses.first, witnesses.second, witnesses.first_output,
                            witnesses.second_output, exploit, 0});
    return true;
  }
  if (!a) v.unstable_outputs.insert(witnesses.first_output);
  if (!b || (a && *a == *b)) v.unstable_outputs.insert(witnesses.second_output);
  return false;
}

Selection FuzzerState::select_next(Rng& rng) const {
  if (corpus.empty()) throw PreconditionError("main corpus is empty; at least one seed is needed");
  if (!violations.empty() && (rng() & 1) != 0) {
    std::uniform_int_distribution<std::size_t> pick(0, violations.size() - 1);
    return {Origin::kViolationCorpus, pick(rng)};
  }
  std::uniform_int_distribution<std::size_t> pick(0, corpus.size() - 1);
  return {Origin::kMainCorpus, pick(rng)};
}

const IOHashValue* FuzzerState::find(const Hash128& pub) const {
  auto it = map.find(pub);
  return it == map.end() ? nullptr : &it->second;
}

IOHashValue& FuzzerState::at(const Hash128& pub) {
  auto it = map.find(pub);
  if (it == map.end()) throw std::out_of_range("unknown public input " + pub.hex());
  return it->second;
}

void FuzzerState::add_violation(Violation v) {
  if (!violation_index_.insert(v.public_hash).second) return;
  violations.push_back(std::move(v));
}

std::vector<std::string> FuzzerState::check_invariants() const {
  std::vector<std::string> problems;
  for (const auto& [pub, v] : map) {
    std::uint64_t entries = 0;
    for (const auto& [_, l] : v.uniform_pub_outs_to_sec_ins) entries += l.size();
    for (const auto& [_, l] : v.non_uniform_pub_outs_to_sec_ins) entries += l.size();
    if (v.hits < entries) {
      problems.push_back(pub.hex() + ": hits " + std::to_string(v.hits) + " < entries " +
                         std::to_string(entries));
    }
  }
  std::unordered_set<Hash128, Hash128Hasher> seen;
  for (const auto& viol : violations) {
    if (!seen.insert(viol.public_hash).second) {
      problems.push_back(viol.public_hash.hex() + ": duplicate violation");
    }
    const IOHashValue* v = find(viol.public_hash);
    if (v == nullptr) {
      problems.push_back(viol.public_hash.hex() + ": violation without map entry");
    } else if (v->distinct_outputs() < 2) {
      problems.push_back(viol.public_hash.hex() + ": violation with < 2 distinct outputs");
    }
  }
  return problems;
}

nlohmann::json FuzzerState::to_snapshot_json() const {
  std::vector<const std::pair<const Hash128, IOHashValue>*> entries;
  entries.reserve(map.size());
  for (const auto& e : map) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](const auto* a, const auto* b) { return a->first < b->first; });

  nlohmann::json publics = nlohmann::json::array();
  for (const auto* e : entries) {
    const IOHashValue& v = e->second;
    std::vector<Hash128> unstable(v.unstable_outputs.begin(), v.unstable_outputs.end());
    std::sort(unstable.begin(), unstable.end());
    nlohmann::json unstable_json = nlohmann::json::array();
    for (const auto& h : unstable) unstable_json.push_back(h.hex());
    nlohmann::json p = {
        {"public_hash", e->first.hex()},
        {"public_input", bytes_to_hex(v.representative_public_input)},
        {"hits", v.hits},
        {"uniform", output_counts(v.uniform_pub_outs_to_sec_ins)},
        {"non_uniform", output_counts(v.non_uniform_pub_outs_to_sec_ins)},
        {"unstable", unstable_json},
        {"bitflips_done", v.bitflips_done},
    };
    if (v.bitflip_map) p["bitflip_map"] = bitflip_map_to_json(*v.bitflip_map);
    publics.push_back(std::move(p));
  }
  nlohmann::json viols = nlohmann::json::array();
  for (const auto& viol : violations) {
    viols.push_back({{"public_hash", viol.public_hash.hex()},
                     {"witness_a", bytes_to_hex(serialize(viol.witness_a))},
                     {"witness_b", bytes_to_hex(serialize(viol.witness_b))},
                     {"output_a", viol.output_a.hex()},
                     {"output_b", viol.output_b.hex()},
                     {"exploit_input", bytes_to_hex(serialize(viol.exploit_input))},
                     {"visits", viol.visits}});
  }
  return {{"format", kSnapshotFormat},
          {"version", kSnapshotVersion},
          {"corpus_size", corpus.size()},
          {"coverage_edges", coverage.edges_seen()},
          {"publics", publics},
          {"violations", viols}};
}

FuzzerState FuzzerState::from_snapshot_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kSnapshotFormat ||
        j.at("version").get<int>() != kSnapshotVersion) {
      throw FormatError("not a nifuzz state snapshot (or unsupported version)");
    }
    FuzzerState s;
    for (const auto& p : j.at("publics")) {
      IOHashValue v;
      v.representative_public_input = bytes_from_hex(p.at("public_input").get<std::string>());
      v.hits = p.at("hits").get<std::uint64_t>();
      v.uniform_pub_outs_to_sec_ins = output_counts_from_json(p.at("uniform"));
      v.non_uniform_pub_outs_to_sec_ins = output_counts_from_json(p.at("non_uniform"));
      for (const auto& h : p.at("unstable")) v.unstable_outputs.insert(hash_from_json(h));
      v.bitflips_done = p.at("bitflips_done").get<bool>();
      if (p.contains("bitflip_map")) v.bitflip_map = bitflip_map_from_json(p["bitflip_map"]);
      const Hash128 h = hash_from_json(p.at("public_hash"));
      if (s.map.emplace(h, std::move(v)).second) s.public_order.push_back(h);
    }
    for (const auto& e : j.at("violations")) {
      auto load = [&](const char* key) {
        const Bytes raw = bytes_from_hex(e.at(key).get<std::string>());
        return deserialize(raw);
      };
      s.add_violation(Violation{hash_from_json(e.at("public_hash")), load("witness_a"),
                                load("witness_b"), hash_from_json(e.at("output_a")),
                                hash_from_json(e.at("output_b")), load("exploit_input"),
                                e.at("visits").get<std::uint64_t>()});
    }
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw FormatError(std::string("malformed snapshot: ") + ex.what());
  }
}

}  // namespace nifuzz
