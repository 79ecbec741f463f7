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

#include "core/targets.hpp"

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>

namespace nifuzz {
namespace {

constexpr PartSet kExplicitOnly(0b001);
constexpr PartSet kStackOnly(0b010);
constexpr PartSet kHeapOnly(0b100);

std::uint8_t first_byte(std::span<const std::uint8_t> b) { return b.empty() ? 0 : b[0]; }

void put_u32(Bytes& out, std::size_t pos, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[pos + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_u64(Bytes& out, std::size_t pos, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[pos + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void emit_byte(TargetContext& ctx, std::uint8_t b) { ctx.write_stdout({&b, 1}); }

InProcessFn stateless(InProcessFn fn) { return fn; }

std::vector<TargetInfo> builtin() {
  std::vector<TargetInfo> t;
  auto add = [&t](std::string name, std::string summary, PartSet parts, InProcessFn fn) {
    t.push_back({std::move(name), std::move(summary), parts, [fn] { return stateless(fn); }});
  };

  // --- direct leaks of the explicit secret ---------------------------------
  add("identity", "prints the explicit secret unchanged", kExplicitOnly, [](TargetContext& ctx) {
    ctx.hit(1);
    ctx.write_stdout(ctx.secret(SecretPartId::kExplicit));
  });

  add("bitwise-not", "prints the bitwise complement of the explicit secret", kExplicitOnly,
      [](TargetContext& ctx) {
        ctx.hit(1);
        Bytes out(ctx.secret(SecretPartId::kExplicit).begin(),
                  ctx.secret(SecretPartId::kExplicit).end());
        for (auto& b : out) b = static_cast<std::uint8_t>(~b);
        ctx.write_stdout(out);
      });

  add("and-mask", "public == 0 ? secret & 0b01001000 : 0", kExplicitOnly,
      [](TargetContext& ctx) {
        if (first_byte(ctx.public_part()) == 0) {
          ctx.hit(1);
          emit_byte(ctx, first_byte(ctx.secret(SecretPartId::kExplicit)) & 0b01001000);
        } else {
          ctx.hit(2);
          emit_byte(ctx, 0);
        }
      });

  add("target-func", "low % 4 == 0 ? high % 4 : low % 4 (2-bit leak)", kExplicitOnly,
      [](TargetContext& ctx) {
        const std::uint8_t low = first_byte(ctx.public_part());
        const std::uint8_t high = first_byte(ctx.secret(SecretPartId::kExplicit));
        if (low % 4 == 0) {
          ctx.hit(1);
          emit_byte(ctx, high % 4);
        } else {
          ctx.hit(2);
          emit_byte(ctx, low % 4);
        }
      });

  add("low-bits", "prints the two low bits of the explicit secret", kExplicitOnly,
      [](TargetContext& ctx) {
        ctx.hit(1);
        emit_byte(ctx, first_byte(ctx.secret(SecretPartId::kExplicit)) & 0b11);
      });

  add("caveat", "(secret & 7) == 7 ? 4 : secret & 3", kExplicitOnly, [](TargetContext& ctx) {
    const std::uint8_t s = first_byte(ctx.secret(SecretPartId::kExplicit));
    if ((s & 0b111) == 0b111) {
      ctx.hit(1);
      emit_byte(ctx, 0b100);
    } else {
      ctx.hit(2);
      emit_byte(ctx, s & 0b11);
    }
  });

  add("threshold", "prints whether the 32-bit secret is below 1000", kExplicitOnly,
      [](TargetContext& ctx) {
        const bool below = read_u32_le(ctx.secret(SecretPartId::kExplicit)) < 1000;
        ctx.hit(below ? 1 : 2);
        emit_byte(ctx, below ? 1 : 0);
      });

  add("branchy", "secret == 1 ? (public < 3 ? 0 : 1) : 0", kExplicitOnly,
      [](TargetContext& ctx) {
        const std::uint8_t secret = first_byte(ctx.secret(SecretPartId::kExplicit));
        const std::uint8_t pub = first_byte(ctx.public_part());
        std::uint8_t out = 0;
        if (secret == 1) {
          ctx.hit(1);
          if (pub < 3) {
            ctx.hit(2);
          } else {
            ctx.hit(3);
            out = 1;
          }
        } else {
          ctx.hit(4);
        }
        emit_byte(ctx, out);
      });

  // public % 10 == 0 ? (secret < 0xFFFF ? 0 : 1) : 101, over 32-bit values.
  add("sparse-leak", "CMI demo: 1 in 10 public values leak whether secret < 0xFFFF", kExplicitOnly,
      [](TargetContext& ctx) {
        const std::uint32_t pub = read_u32_le(ctx.public_part());
        const std::uint32_t secret = read_u32_le(ctx.secret(SecretPartId::kExplicit));
        std::uint32_t ret = 101;
        if (pub % 10 == 0) {
          ctx.hit(1);
          if (secret < 0xFFFF) {
            ctx.hit(2);
            ret = 0;
          } else {
            ctx.hit(3);
            ret = 1;
          }
        } else {
          ctx.hit(4);
        }
        Bytes out(4);
        put_u32(out, 0, ret);
        ctx.write_stdout(out);
      });

  // Guesses are newline-separated in the public part; the password is the
  // explicit secret.
  add("password", "password checker answering one line per guess", kExplicitOnly,
      [](TargetContext& ctx) {
        const auto secret = ctx.secret(SecretPartId::kExplicit);
        const auto pub = ctx.public_part();
        std::size_t start = 0;
        int guesses = 0;
        while (start <= pub.size() && guesses < 16) {
          std::size_t end = start;
          while (end < pub.size() && pub[end] != '\n') ++end;
          const auto guess = pub.subspan(start, end - start);
          const bool ok = guess.size() == secret.size() &&
                          std::equal(guess.begin(), guess.end(), secret.begin());
          ctx.hit(ok ? 1 : 2);
          ctx.print(ok ? "granted\n" : "denied\n");
          ++guesses;
          if (end == pub.size()) break;
          start = end + 1;
        }
      });

  add("explicit-701-bit", "prints the first 701 bits of the explicit secret", kExplicitOnly,
      [](TargetContext& ctx) {
        constexpr std::size_t kBits = 701;
        Bytes out((kBits + 7) / 8, 0);
        const auto secret = ctx.secret(SecretPartId::kExplicit);
        std::copy_n(secret.begin(), std::min(secret.size(), out.size()), out.begin());
        out.back() &= static_cast<std::uint8_t>((1u << (kBits % 8)) - 1);
        ctx.hit(1);
        ctx.write_stdout(out);
      });

  // 32 bits of identity leak followed by a 16-byte block that depends
  // non-linearly on the whole secret.
  add("noise-block", "identity on 4 secret bytes plus a hashed 16-byte block", kExplicitOnly,
      [](TargetContext& ctx) {
        const auto secret = ctx.secret(SecretPartId::kExplicit);
        Bytes out(4, 0);
        std::copy_n(secret.begin(), std::min<std::size_t>(secret.size(), 4), out.begin());
        const Hash128 h = hash128(secret, 0x6e6f6973);
        Bytes block(16);
        put_u64(block, 0, h.lo);
        put_u64(block, 8, h.hi);
        out.insert(out.end(), block.begin(), block.end());
        ctx.hit(1);
        ctx.write_stdout(out);
      });

  // --- uninitialised memory replicas ---------------------------------------
  // struct { void* ss_sp; int ss_flags; /* 4 bytes padding */ size_t ss_size; }
  add("padding-leak", "stack_t copy-out leaking 4 bytes of struct padding", kStackOnly,
      [](TargetContext& ctx) {
        Bytes frame = ctx.uninit_stack(24);
        put_u64(frame, 0, read_u32_le(ctx.public_part()));
        put_u32(frame, 8, 2);  // SS_DISABLE
        put_u64(frame, 16, 8192);
        ctx.hit(1);
        ctx.write_stdout(frame);
      });

  // struct { u16 family; u8 channel; /* 1 byte padding */ u32 flags; }
  add("stack-probe-8", "getsockopt-style copy-out leaking one padding byte", kStackOnly,
      [](TargetContext& ctx) {
        Bytes frame = ctx.uninit_stack(8);
        frame[0] = 31;
        frame[1] = 0;
        frame[2] = first_byte(ctx.public_part());
        put_u32(frame, 4, 0);
        ctx.hit(1);
        ctx.write_stdout(frame);
      });

  add("stack-2048-bit", "copies out 256 bytes of uninitialised stack", kStackOnly,
      [](TargetContext& ctx) {
        ctx.hit(1);
        ctx.write_stdout(ctx.uninit_stack(256));
      });

  add("heap-1024-bit", "copies out a 128-byte uninitialised heap buffer", kHeapOnly,
      [](TargetContext& ctx) {
        ctx.hit(1);
        ctx.write_stdout(ctx.uninit_heap(128));
      });

  // --- non-interfering programs ------------------------------------------
  add("constant", "always prints the same line", kExplicitOnly, [](TargetContext& ctx) {
    ctx.hit(1);
    ctx.print("hello\n");
  });

  add("echo-public", "prints the public part", kExplicitOnly, [](TargetContext& ctx) {
    ctx.hit(1);
    ctx.write_stdout(ctx.public_part());
  });

  add("public-branches", "branches on public bytes only, reads the secret", kExplicitOnly,
      [](TargetContext& ctx) {
        const auto pub = ctx.public_part();
        [[maybe_unused]] volatile std::size_t secret_len =
            ctx.secret(SecretPartId::kExplicit).size();
        std::uint32_t acc = 0;
        for (std::size_t i = 0; i < std::min<std::size_t>(pub.size(), 8); ++i) {
          if (pub[i] > 0x80) {
            ctx.hit(10 + i);
            acc = acc * 31 + pub[i];
          } else {
            ctx.hit(20 + i);
            acc ^= pub[i];
          }
        }
        Bytes out(4);
        put_u32(out, 0, acc);
        ctx.write_stdout(out);
      });

  add("masked-secret", "combines the secret with public data but masks it out", kExplicitOnly,
      [](TargetContext& ctx) {
        const auto secret = ctx.secret(SecretPartId::kExplicit);
        Bytes out(ctx.public_part().begin(), ctx.public_part().end());
        for (std::size_t i = 0; i < out.size(); ++i) {
          const std::uint8_t s = i < secret.size() ? secret[i] : 0;
          out[i] = static_cast<std::uint8_t>(out[i] + (s & 0) + (s ^ s));
        }
        ctx.hit(1);
        ctx.write_stdout(out);
      });

  add("init-struct", "stack_t copy-out with the padding cleared", kStackOnly,
      [](TargetContext& ctx) {
        Bytes frame = ctx.uninit_stack(24);
        std::fill(frame.begin(), frame.end(), 0);  // memset before filling fields
        put_u64(frame, 0, read_u32_le(ctx.public_part()));
        put_u32(frame, 8, 2);
        put_u64(frame, 16, 8192);
        ctx.hit(1);
        ctx.write_stdout(frame);
      });

  add("heap-init", "zero-initialised heap buffer echoed with public data", kHeapOnly,
      [](TargetContext& ctx) {
        Bytes buf = ctx.uninit_heap(32);
        std::fill(buf.begin(), buf.end(), 0);
        const auto pub = ctx.public_part();
        std::copy_n(pub.begin(), std::min(pub.size(), buf.size()), buf.begin());
        ctx.hit(1);
        ctx.write_stdout(buf);
      });

  // --- nondeterministic --------------------------------------------------
  t.push_back({"run-counter", "echoes the public part followed by a run counter", kExplicitOnly,
               [] {
                 auto counter = std::make_shared<std::uint32_t>(0);
                 return InProcessFn([counter](TargetContext& ctx) {
                   ctx.hit(1);
                   ctx.write_stdout(ctx.public_part());
                   ctx.print(std::to_string((*counter)++));
                 });
               }});
  return t;
}

struct Registry {
  std::mutex mu;
  std::vector<TargetInfo> targets = builtin();
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

std::uint32_t read_u32_le(std::span<const std::uint8_t> bytes) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < std::min<std::size_t>(bytes.size(), 4); ++i) {
    v |= std::uint32_t{bytes[i]} << (8 * i);
  }
  return v;
}

std::vector<TargetInfo> list_targets() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.targets;
}

std::optional<TargetInfo> find_target(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  for (const auto& t : r.targets) {
    if (t.name == name) return t;
  }
  return std::nullopt;
}

void register_target(TargetInfo info) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  auto it = std::find_if(r.targets.begin(), r.targets.end(),
                         [&](const TargetInfo& t) { return t.name == info.name; });
  if (it != r.targets.end()) {
    *it = std::move(info);
  } else {
    r.targets.push_back(std::move(info));
  }
}

}  // namespace nifuzz
