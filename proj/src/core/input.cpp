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

#include "core/input.hpp"

#include <fstream>
#include <iterator>
#include <stdexcept>

#include "core/errors.hpp"

namespace nifuzz {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'N', 'I', 'F', 'Z'};
constexpr std::uint8_t kVersion = 0x01;

void put_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_part(Bytes& out, const Bytes& part) {
  if (part.size() > UINT32_MAX) throw std::length_error("part exceeds 4 GiB");
  put_u32(out, static_cast<std::uint32_t>(part.size()));
  out.insert(out.end(), part.begin(), part.end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t byte() {
    need(1);
    return data_[pos_++];
  }

  Bytes part() {
    need(4);
    std::uint32_t len = 0;
    for (int i = 3; i >= 0; --i) len = (len << 8) | data_[pos_ + i];
    pos_ += 4;
    need(len);
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) throw FormatError("truncated input container");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view part_name(SecretPartId part) {
  switch (part) {
    case SecretPartId::kExplicit: return "explicit";
    case SecretPartId::kStack: return "stack";
    case SecretPartId::kHeap: return "heap";
  }
  return "unknown";
}

std::optional<SecretPartId> part_from_name(std::string_view name) {
  for (SecretPartId p : kAllSecretParts) {
    if (part_name(p) == name) return p;
  }
  return std::nullopt;
}

PartSet PartSet::parse(std::string_view comma_list) {
  PartSet set;
  while (!comma_list.empty()) {
    const auto comma = comma_list.find(',');
    std::string_view item = comma_list.substr(0, comma);
    comma_list = comma == std::string_view::npos ? std::string_view{}
                                                 : comma_list.substr(comma + 1);
    if (item.empty()) continue;
    auto part = part_from_name(item);
    if (!part) throw ConfigError("unknown secret part '" + std::string(item) + "'");
    set.insert(*part);
  }
  return set;
}

std::string PartSet::to_string() const {
  std::string out;
  for (SecretPartId p : kAllSecretParts) {
    if (!contains(p)) continue;
    if (!out.empty()) out += ',';
    out += part_name(p);
  }
  return out;
}

std::optional<Bytes>& StructuredInput::secret(SecretPartId part) {
  switch (part) {
    case SecretPartId::kExplicit: return explicit_secret;
    case SecretPartId::kStack: return stack_secret;
    case SecretPartId::kHeap: return heap_secret;
  }
  throw std::invalid_argument("bad secret part id");
}

const std::optional<Bytes>& StructuredInput::secret(SecretPartId part) const {
  return const_cast<StructuredInput*>(this)->secret(part);
}

PartSet StructuredInput::present_parts() const {
  PartSet set;
  for (SecretPartId p : kAllSecretParts) {
    if (secret(p)) set.insert(p);
  }
  return set;
}

Bytes serialize(const StructuredInput& input) {
  Bytes out(kMagic.begin(), kMagic.end());
  out.push_back(kVersion);
  out.push_back(input.present_parts().mask());
  put_part(out, input.public_part);
  for (SecretPartId p : kAllSecretParts) {
    if (const auto& part = input.secret(p)) put_part(out, *part);
  }
  return out;
}

StructuredInput deserialize(std::span<const std::uint8_t> data) {
  Reader reader(data);
  for (std::uint8_t m : kMagic) {
    if (reader.byte() != m) throw FormatError("bad container magic");
  }
  if (const auto version = reader.byte(); version != kVersion) {
    throw FormatError("unsupported container version " + std::to_string(version));
  }
  const std::uint8_t mask = reader.byte();
  if (mask & ~0x7u) throw FormatError("bad presence mask");

  StructuredInput input;
  input.public_part = reader.part();
  const PartSet present(mask);
  for (SecretPartId p : kAllSecretParts) {
    if (present.contains(p)) input.secret(p) = reader.part();
  }
  if (!reader.done()) throw FormatError("trailing bytes after container");
  return input;
}

StructuredInput read_input_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open input file " + path);
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(data);
}

void write_input_file(const std::string& path, const StructuredInput& input) {
  const Bytes data = serialize(input);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

void flip_bit_in_place(StructuredInput& input, BitCoordinate coord) {
  auto& part = input.secret(coord.part);
  if (!part || coord.bit_index >= part->size() * 8) {
    throw std::out_of_range("bit coordinate (" + std::string(part_name(coord.part)) +
                            ", " + std::to_string(coord.bit_index) + ") out of range");
  }
  (*part)[coord.bit_index / 8] ^= static_cast<std::uint8_t>(1u << (coord.bit_index % 8));
}

StructuredInput flip_bit(const StructuredInput& input, BitCoordinate coord) {
  StructuredInput out = input;
  flip_bit_in_place(out, coord);
  return out;
}

StructuredInput extend_secret_part(const StructuredInput& input, SecretPartId part,
                                   std::size_t new_bit_length) {
  const auto& current = input.secret(part);
  if (!current) {
    throw PreconditionError("cannot extend absent part " + std::string(part_name(part)));
  }
  if (new_bit_length < current->size() * 8) {
    throw PreconditionError("extension shorter than current part");
  }
  const std::size_t new_len = (new_bit_length + 7) / 8;
  StructuredInput out = input;
  if (current->empty() || new_len == current->size()) return out;

  Bytes tiled(new_len);
  for (std::size_t i = 0; i < new_len; ++i) tiled[i] = (*current)[i % current->size()];
  out.secret(part) = std::move(tiled);
  return out;
}

Hash128 public_hash(std::span<const std::uint8_t> public_bytes) {
  return hash128(public_bytes, 0x7075626c);
}

Hash128 public_hash(const StructuredInput& input) { return public_hash(input.public_part); }

Hash128 secret_hash(const StructuredInput& input) {
  Bytes buf;
  buf.push_back(input.present_parts().mask());
  for (SecretPartId p : kAllSecretParts) {
    if (const auto& part = input.secret(p)) put_part(buf, *part);
  }
  return hash128(buf, 0x73656372);
}

}  // namespace nifuzz
