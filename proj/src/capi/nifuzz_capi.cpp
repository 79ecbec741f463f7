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

#include "nifuzz/nifuzz.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>

#include "core/campaign.hpp"
#include "core/errors.hpp"
#include "core/targets.hpp"

struct nifuzz_config {
  nifuzz::CampaignConfig config;
};

struct nifuzz_campaign {
  nifuzz::CampaignConfig config;
  std::unique_ptr<nifuzz::TargetBackend> backend;
  std::optional<nifuzz::QifReport> report;
};

struct nifuzz_exec {
  nifuzz::TargetContext* ctx;
};

namespace {

thread_local std::string g_last_error;

nifuzz_status fail(nifuzz_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

template <class F>
nifuzz_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const nifuzz::ConfigError& e) {
    return fail(NIFUZZ_ERR_CONFIG, e.what());
  } catch (const nifuzz::TargetError& e) {
    return fail(NIFUZZ_ERR_TARGET, e.what());
  } catch (const nifuzz::MemoryBudgetError& e) {
    return fail(NIFUZZ_ERR_MEMORY_BUDGET, e.what());
  } catch (const nifuzz::FormatError& e) {
    return fail(NIFUZZ_ERR_FORMAT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(NIFUZZ_ERR_MEMORY_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return fail(NIFUZZ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(NIFUZZ_ERR_INTERNAL, "unknown error");
  }
}

nifuzz_status copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
  if (needed != nullptr) *needed = text.size() + 1;
  if (buf == nullptr || cap < text.size() + 1) {
    return fail(NIFUZZ_ERR_BUFFER_TOO_SMALL,
                "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return NIFUZZ_OK;
}

#define NIFUZZ_REQUIRE(cond, what) \
  if (!(cond)) return fail(NIFUZZ_ERR_INVALID_ARGUMENT, what)

template <class F>
nifuzz_status set(nifuzz_config* c, F&& apply) {
  NIFUZZ_REQUIRE(c != nullptr, "config is NULL");
  return guarded([&] {
    apply(c->config);
    return NIFUZZ_OK;
  });
}

nifuzz_status set_string(nifuzz_config* c, const char* value, std::string nifuzz::CampaignConfig::*field) {
  NIFUZZ_REQUIRE(value != nullptr, "string argument is NULL");
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.*field = value; });
}

}  // namespace

extern "C" {

const char* nifuzz_version(void) { return NIFUZZ_VERSION; }

const char* nifuzz_last_error(void) { return g_last_error.c_str(); }

const char* nifuzz_status_name(nifuzz_status s) {
  switch (s) {
    case NIFUZZ_OK:
      return "ok";
    case NIFUZZ_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case NIFUZZ_ERR_CONFIG:
      return "configuration error";
    case NIFUZZ_ERR_TARGET:
      return "target error";
    case NIFUZZ_ERR_MEMORY_BUDGET:
      return "memory budget exceeded";
    case NIFUZZ_ERR_FORMAT:
      return "format error";
    case NIFUZZ_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
    case NIFUZZ_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

nifuzz_status nifuzz_config_create(nifuzz_config** out) {
  NIFUZZ_REQUIRE(out != nullptr, "out is NULL");
  return guarded([&] {
    *out = new nifuzz_config{};
    return NIFUZZ_OK;
  });
}

void nifuzz_config_destroy(nifuzz_config* c) { delete c; }

nifuzz_status nifuzz_config_set_target(nifuzz_config* c, const char* target) {
  return set_string(c, target, &nifuzz::CampaignConfig::target);
}

nifuzz_status nifuzz_config_set_seeds_dir(nifuzz_config* c, const char* dir) {
  return set_string(c, dir, &nifuzz::CampaignConfig::seeds_dir);
}

nifuzz_status nifuzz_config_set_out_dir(nifuzz_config* c, const char* dir) {
  return set_string(c, dir, &nifuzz::CampaignConfig::out_dir);
}

nifuzz_status nifuzz_config_set_parts(nifuzz_config* c, const char* parts) {
  NIFUZZ_REQUIRE(parts != nullptr, "parts is NULL");
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.parts = nifuzz::PartSet::parse(parts); });
}

nifuzz_status nifuzz_config_set_budget_secs(nifuzz_config* c, double secs) {
  NIFUZZ_REQUIRE(secs > 0.0, "budget must be positive");
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.budget_secs = secs; });
}

nifuzz_status nifuzz_config_set_timeout_secs(nifuzz_config* c, double secs) {
  NIFUZZ_REQUIRE(secs > 0.0, "timeout must be positive");
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.timeout_secs = secs; });
}

nifuzz_status nifuzz_config_set_map_size(nifuzz_config* c, size_t size) {
  NIFUZZ_REQUIRE(size > 0, "map size must be positive");
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.map_size = size; });
}

nifuzz_status nifuzz_config_set_rng_seed(nifuzz_config* c, uint64_t seed) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.rng_seed = seed; });
}

nifuzz_status nifuzz_config_set_force_uniform_public(nifuzz_config* c, int enable) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.force_uniform_public = enable != 0; });
}

nifuzz_status nifuzz_config_set_min_hits(nifuzz_config* c, uint64_t min_hits) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.min_hits = min_hits; });
}

nifuzz_status nifuzz_config_set_max_execs(nifuzz_config* c, uint64_t max_execs) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.max_execs = max_execs; });
}

nifuzz_status nifuzz_config_set_virtual_clock(nifuzz_config* c, int enable) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.virtual_clock = enable != 0; });
}

nifuzz_status nifuzz_config_set_memory_budget_mb(nifuzz_config* c, uint64_t mb) {
  return set(c, [&](nifuzz::CampaignConfig& cfg) { cfg.memory_budget_mb = mb; });
}

nifuzz_status nifuzz_campaign_create(const nifuzz_config* config, nifuzz_campaign** out) {
  NIFUZZ_REQUIRE(config != nullptr && out != nullptr, "config or out is NULL");
  *out = nullptr;
  return guarded([&] {
    nifuzz::validate(config->config);
    auto campaign = std::make_unique<nifuzz_campaign>();
    campaign->config = config->config;
    campaign->backend = nifuzz::make_backend(campaign->config);
    *out = campaign.release();
    return NIFUZZ_OK;
  });
}

nifuzz_status nifuzz_campaign_run(nifuzz_campaign* campaign, nifuzz_progress_fn progress,
                                  void* user) {
  NIFUZZ_REQUIRE(campaign != nullptr, "campaign is NULL");
  return guarded([&] {
    nifuzz::CampaignHooks hooks;
    if (progress != nullptr) {
      hooks.on_stats = [&](const nifuzz::QifReport& r) {
        const std::string line = nifuzz::to_json(r).dump();
        return progress(line.c_str(), user) != 0;
      };
    }
    nifuzz::CampaignResult result = nifuzz::run_campaign(campaign->config, *campaign->backend, hooks);
    campaign->report = result.report;
    if (result.stop_reason == nifuzz::StopReason::kMemoryBudget) {
      return fail(NIFUZZ_ERR_MEMORY_BUDGET, result.diagnostic);
    }
    return NIFUZZ_OK;
  });
}

nifuzz_status nifuzz_campaign_report_json(const nifuzz_campaign* campaign, char* buf, size_t cap,
                                          size_t* needed) {
  NIFUZZ_REQUIRE(campaign != nullptr, "campaign is NULL");
  if (!campaign->report) return fail(NIFUZZ_ERR_INVALID_ARGUMENT, "campaign has not run");
  return guarded([&] { return copy_out(nifuzz::to_json(*campaign->report).dump(2), buf, cap, needed); });
}

void nifuzz_campaign_destroy(nifuzz_campaign* campaign) { delete campaign; }

nifuzz_status nifuzz_replay(const nifuzz_config* config, const char* path, char* buf, size_t cap,
                            size_t* needed) {
  NIFUZZ_REQUIRE(config != nullptr && path != nullptr, "config or path is NULL");
  return guarded([&] {
    auto backend = nifuzz::make_backend(config->config);
    const auto runs = nifuzz::replay(*backend, path);
    nlohmann::json arr = nlohmann::json::array();
    bool differ = false;
    for (const auto& r : runs) {
      differ |= r.output != runs.front().output;
      arr.push_back({{"path", r.path},
                     {"exit", std::string(nifuzz::exit_kind_name(r.exit_kind))},
                     {"stdout_hex", nifuzz::bytes_to_hex(r.output.stdout_bytes)},
                     {"stderr_hex", nifuzz::bytes_to_hex(r.output.stderr_bytes)},
                     {"output_hash", r.output.hash().hex()}});
    }
    const nlohmann::json j = {{"runs", arr}, {"outputs_differ", differ}};
    return copy_out(j.dump(2), buf, cap, needed);
  });
}

nifuzz_status nifuzz_report_from_snapshot(const char* snapshot_path, int64_t min_hits, char* buf,
                                          size_t cap, size_t* needed) {
  NIFUZZ_REQUIRE(snapshot_path != nullptr, "snapshot path is NULL");
  return guarded([&] {
    std::optional<std::uint64_t> hits;
    if (min_hits >= 0) hits = static_cast<std::uint64_t>(min_hits);
    const nifuzz::QifReport r = nifuzz::report_from_snapshot(snapshot_path, hits);
    return copy_out(nifuzz::to_json(r).dump(2), buf, cap, needed);
  });
}

nifuzz_status nifuzz_list_targets(char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : nifuzz::list_targets()) {
      arr.push_back({{"name", t.name}, {"summary", t.summary}, {"parts", t.parts.to_string()}});
    }
    return copy_out(arr.dump(2), buf, cap, needed);
  });
}

nifuzz_status nifuzz_register_target(const char* name, const char* parts, nifuzz_target_fn fn,
                                     void* user) {
  NIFUZZ_REQUIRE(name != nullptr && *name != '\0', "target name is empty");
  NIFUZZ_REQUIRE(parts != nullptr && fn != nullptr, "parts or callback is NULL");
  return guarded([&] {
    nifuzz::TargetInfo info;
    info.name = name;
    info.summary = "registered through the C interface";
    info.parts = nifuzz::PartSet::parse(parts);
    info.make = [fn, user]() -> nifuzz::InProcessFn {
      return [fn, user](nifuzz::TargetContext& ctx) {
        nifuzz_exec exec{&ctx};
        fn(&exec, user);
      };
    };
    nifuzz::register_target(std::move(info));
    return NIFUZZ_OK;
  });
}

int64_t nifuzz_exec_part(const nifuzz_exec* exec, nifuzz_part part, const uint8_t** data) {
  if (exec == nullptr) return -1;
  const nifuzz::StructuredInput& in = exec->ctx->input();
  const nifuzz::Bytes* bytes = nullptr;
  switch (part) {
    case NIFUZZ_PART_PUBLIC:
      bytes = &in.public_part;
      break;
    case NIFUZZ_PART_EXPLICIT:
    case NIFUZZ_PART_STACK:
    case NIFUZZ_PART_HEAP: {
      const auto& s = in.secret(static_cast<nifuzz::SecretPartId>(part - 1));
      if (s) bytes = &*s;
      break;
    }
  }
  if (bytes == nullptr) return -1;
  if (data != nullptr) *data = bytes->data();
  return static_cast<int64_t>(bytes->size());
}

void nifuzz_exec_write(nifuzz_exec* exec, nifuzz_stream stream, const uint8_t* data, size_t len) {
  if (exec == nullptr || (data == nullptr && len != 0)) return;
  const std::span<const std::uint8_t> bytes(data, len);
  if (stream == NIFUZZ_STDERR) {
    exec->ctx->write_stderr(bytes);
  } else {
    exec->ctx->write_stdout(bytes);
  }
}

void nifuzz_exec_hit(nifuzz_exec* exec, uint64_t branch_id) {
  if (exec != nullptr) exec->ctx->hit(branch_id);
}

}  // extern "C"
