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

// Fuzzer state: per public input, every output observed and which secret
// inputs produced it; the coverage corpus; the violation corpus.

#ifndef NIFUZZ_CORE_STATE_HPP_
#define NIFUZZ_CORE_STATE_HPP_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "core/executor.hpp"
#include "core/hash.hpp"
#include "core/input.hpp"
#include "core/mutate.hpp"
#include "json.hpp"

namespace nifuzz {

// Secret-input bit -> public-output bit positions (over stdout||stderr).
using BitflipMap = std::map<BitCoordinate, std::set<std::size_t>>;

nlohmann::json bitflip_map_to_json(const BitflipMap& map);
BitflipMap bitflip_map_from_json(const nlohmann::json& j);

enum class Phase : std::uint8_t { kUniform, kNonUniform };

// Hashes of the secret inputs that produced one output. A list restored from
// a snapshot keeps only its length.
class SecretHashList {
 public:
  void push(std::uint64_t secret_hash) {
    hashes_.push_back(secret_hash);
    ++count_;
  }
  std::uint64_t size() const { return count_; }
  const std::vector<std::uint64_t>& hashes() const { return hashes_; }

  static SecretHashList with_count(std::uint64_t n) {
    SecretHashList l;
    l.count_ = n;
    return l;
  }

 private:
  std::vector<std::uint64_t> hashes_;
  std::uint64_t count_ = 0;
};

using OutputMap = std::unordered_map<Hash128, SecretHashList, Hash128Hasher>;

struct IOHashValue {
  // One full secret input per distinct output first seen outside uniform
  // sampling; used to replay witnesses. Public part left empty.
  std::unordered_map<Hash128, StructuredInput, Hash128Hasher> secret_input_for_public_output;
  std::uint64_t hits = 0;
  OutputMap uniform_pub_outs_to_sec_ins;
  OutputMap non_uniform_pub_outs_to_sec_ins;
  // Outputs produced by a witness that failed re-execution; excluded from
  // every distinct-output count from then on.
  std::unordered_set<Hash128, Hash128Hasher> unstable_outputs;
  std::optional<BitflipMap> bitflip_map;
  bool bitflips_done = false;
  Bytes representative_public_input;

  bool has_output(const Hash128& out) const;
  // |uniform keys ∪ non-uniform keys| minus unstable outputs.
  std::size_t distinct_outputs() const;
  // Keys of both maps, unstable ones dropped.
  std::vector<Hash128> output_keys() const;
};

struct Violation {
  Hash128 public_hash;
  StructuredInput witness_a;
  StructuredInput witness_b;
  Hash128 output_a;
  Hash128 output_b;
  // Input the exploit stage works on; replaced by the extended input after
  // secret extension.
  StructuredInput exploit_input;
  std::uint64_t visits = 0;
};

struct WitnessPair {
  StructuredInput first;
  Hash128 first_output;
  StructuredInput second;
  Hash128 second_output;
};

struct RecordOutcome {
  Hash128 public_hash;
  Hash128 output_hash;
  bool first_output_for_public = false;
  bool new_distinct_output = false;
  bool new_coverage = false;
  // A witness pair is ready for confirm_violation.
  std::optional<WitnessPair> candidate;
};

enum class Origin : std::uint8_t { kMainCorpus, kViolationCorpus };

struct Selection {
  Origin origin = Origin::kMainCorpus;
  std::size_t index = 0;
};

// AFL-style edge novelty over bucketed hit counts.
class CoverageAccumulator {
 public:
  // True if any (edge, bucket) pair is new; folds it in.
  bool merge(const CoverageMap& map);
  std::size_t edges_seen() const { return edges_; }

 private:
  std::vector<std::uint8_t> seen_;
  std::size_t edges_ = 0;
};

class FuzzerState {
 public:
  std::unordered_map<Hash128, IOHashValue, Hash128Hasher> map;
  // Coverage corpus; kept as plain inputs so it doubles as the splice pool.
  std::vector<StructuredInput> corpus;
  // Per corpus entry: the probe-pattern secret variant has run on it.
  std::vector<std::uint8_t> corpus_probed;
  std::vector<Violation> violations;
  CoverageAccumulator coverage;
  // Keys of `map` in insertion order, for uniform draws over recorded
  // publics.
  std::vector<Hash128> public_order;

  RecordOutcome record_execution(const StructuredInput& input, const ExecutionResult& result,
                                 Phase phase);

  // Re-runs both witnesses k=3 times. Registers the violation if both are
  // stable and still differ; otherwise marks the offending outputs unstable.
  bool confirm_violation(TargetBackend& backend, const Hash128& public_hash,
                         const WitnessPair& witnesses);

  // Main corpus only until the first violation, then 50/50.
  Selection select_next(Rng& rng) const;

  void add_to_corpus(StructuredInput input) {
    corpus.push_back(std::move(input));
    corpus_probed.push_back(0);
  }

  bool is_violation(const Hash128& public_hash) const {
    return violation_index_.contains(public_hash);
  }
  const IOHashValue* find(const Hash128& public_hash) const;
  IOHashValue& at(const Hash128& public_hash);

  // Adds a violation without re-execution (snapshot import, exhaustive
  // test fixtures).
  void add_violation(Violation v);

  // Invariant sweep; returns human-readable problems, empty when sound.
  std::vector<std::string> check_invariants() const;

  nlohmann::json to_snapshot_json() const;
  static FuzzerState from_snapshot_json(const nlohmann::json& j);

 private:
  std::unordered_set<Hash128, Hash128Hasher> violation_index_;
};

std::string bytes_to_hex(std::span<const std::uint8_t> bytes);
Bytes bytes_from_hex(std::string_view hex);

}  // namespace nifuzz

#endif  // NIFUZZ_CORE_STATE_HPP_
