/*
 * Copyright 2026 The nifuzz Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * nifuzz C interface.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Functions return a nifuzz_status; on failure
 * nifuzz_last_error() describes the problem (per thread, valid until the
 * next call on that thread).
 *
 * Functions that produce text write a NUL-terminated string into a caller
 * buffer. If `cap` is too small they return NIFUZZ_ERR_BUFFER_TOO_SMALL;
 * `*needed` always receives the full size including the terminator, so a
 * call with buf = NULL, cap = 0 is a size query.
 */

#ifndef NIFUZZ_NIFUZZ_H_
#define NIFUZZ_NIFUZZ_H_

#include <stddef.h>
#include <stdint.h>

#if defined(NIFUZZ_BUILDING_LIBRARY)
#define NIFUZZ_API __attribute__((visibility("default")))
#else
#define NIFUZZ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 2-4 double as process exit codes of the command-line tool. */
typedef enum nifuzz_status {
  NIFUZZ_OK = 0,
  NIFUZZ_ERR_INVALID_ARGUMENT = 1,
  NIFUZZ_ERR_CONFIG = 2,
  NIFUZZ_ERR_TARGET = 3,
  NIFUZZ_ERR_MEMORY_BUDGET = 4,
  NIFUZZ_ERR_FORMAT = 5,
  NIFUZZ_ERR_BUFFER_TOO_SMALL = 6,
  NIFUZZ_ERR_INTERNAL = 7
} nifuzz_status;

typedef enum nifuzz_part {
  NIFUZZ_PART_PUBLIC = 0,
  NIFUZZ_PART_EXPLICIT = 1,
  NIFUZZ_PART_STACK = 2,
  NIFUZZ_PART_HEAP = 3
} nifuzz_part;

typedef enum nifuzz_stream { NIFUZZ_STDOUT = 1, NIFUZZ_STDERR = 2 } nifuzz_stream;

NIFUZZ_API const char* nifuzz_version(void);
NIFUZZ_API const char* nifuzz_last_error(void);
NIFUZZ_API const char* nifuzz_status_name(nifuzz_status status);

/* ---- configuration ---------------------------------------------------- */

typedef struct nifuzz_config nifuzz_config;

NIFUZZ_API nifuzz_status nifuzz_config_create(nifuzz_config** out);
NIFUZZ_API void nifuzz_config_destroy(nifuzz_config* config);

/* "inproc:<name>" or a path to an instrumented executable. */
NIFUZZ_API nifuzz_status nifuzz_config_set_target(nifuzz_config* c, const char* target);
NIFUZZ_API nifuzz_status nifuzz_config_set_seeds_dir(nifuzz_config* c, const char* dir);
/* Comma-separated subset of explicit,stack,heap. */
NIFUZZ_API nifuzz_status nifuzz_config_set_parts(nifuzz_config* c, const char* parts);
NIFUZZ_API nifuzz_status nifuzz_config_set_budget_secs(nifuzz_config* c, double secs);
NIFUZZ_API nifuzz_status nifuzz_config_set_timeout_secs(nifuzz_config* c, double secs);
NIFUZZ_API nifuzz_status nifuzz_config_set_map_size(nifuzz_config* c, size_t size);
NIFUZZ_API nifuzz_status nifuzz_config_set_rng_seed(nifuzz_config* c, uint64_t seed);
NIFUZZ_API nifuzz_status nifuzz_config_set_force_uniform_public(nifuzz_config* c, int enable);
NIFUZZ_API nifuzz_status nifuzz_config_set_min_hits(nifuzz_config* c, uint64_t min_hits);
/* Directory for stats.jsonl, report.json, state_snapshot.json, violations/. */
NIFUZZ_API nifuzz_status nifuzz_config_set_out_dir(nifuzz_config* c, const char* dir);
/* 0 = unlimited. */
NIFUZZ_API nifuzz_status nifuzz_config_set_max_execs(nifuzz_config* c, uint64_t max_execs);
/* Time advances 1 us per execution; makes reports reproducible. */
NIFUZZ_API nifuzz_status nifuzz_config_set_virtual_clock(nifuzz_config* c, int enable);
/* 0 disables the resident-set check. */
NIFUZZ_API nifuzz_status nifuzz_config_set_memory_budget_mb(nifuzz_config* c, uint64_t mb);

/* ---- campaigns -------------------------------------------------------- */

typedef struct nifuzz_campaign nifuzz_campaign;

/* Called with each stats line (JSON); a nonzero return ends the campaign. */
typedef int (*nifuzz_progress_fn)(const char* stats_json, void* user);

/* Validates the configuration and resolves the target. */
NIFUZZ_API nifuzz_status nifuzz_campaign_create(const nifuzz_config* config,
                                                nifuzz_campaign** out);
/* Runs to completion. Returns NIFUZZ_ERR_MEMORY_BUDGET (artifacts written)
 * when the resident-set budget stopped the run. */
NIFUZZ_API nifuzz_status nifuzz_campaign_run(nifuzz_campaign* campaign,
                                             nifuzz_progress_fn progress, void* user);
/* Final report as JSON; valid after nifuzz_campaign_run. */
NIFUZZ_API nifuzz_status nifuzz_campaign_report_json(const nifuzz_campaign* campaign, char* buf,
                                                     size_t cap, size_t* needed);
NIFUZZ_API void nifuzz_campaign_destroy(nifuzz_campaign* campaign);

/* ---- offline tools ---------------------------------------------------- */

/* Re-executes a witness file, or every *.bin in a directory, against the
 * configured target. Output: JSON {"runs":[{path,exit,stdout_hex,stderr_hex,
 * output_hash}],"outputs_differ":bool}. */
NIFUZZ_API nifuzz_status nifuzz_replay(const nifuzz_config* config, const char* path, char* buf,
                                       size_t cap, size_t* needed);

/* Recomputes the report from state_snapshot.json. A negative min_hits uses
 * the value stored in the snapshot. */
NIFUZZ_API nifuzz_status nifuzz_report_from_snapshot(const char* snapshot_path, int64_t min_hits,
                                                     char* buf, size_t cap, size_t* needed);

/* JSON array of {name, summary, parts} for all in-process targets. */
NIFUZZ_API nifuzz_status nifuzz_list_targets(char* buf, size_t cap, size_t* needed);

/* ---- custom in-process targets ---------------------------------------- */

typedef struct nifuzz_exec nifuzz_exec;
typedef void (*nifuzz_target_fn)(nifuzz_exec* exec, void* user);

/* Registers (or replaces) "inproc:<name>". `parts` as in set_parts. The
 * callback must be deterministic for results to be meaningful. */
NIFUZZ_API nifuzz_status nifuzz_register_target(const char* name, const char* parts,
                                                nifuzz_target_fn fn, void* user);

/* Length of the part, or -1 if absent; *data points into the input. */
NIFUZZ_API int64_t nifuzz_exec_part(const nifuzz_exec* exec, nifuzz_part part,
                                    const uint8_t** data);
NIFUZZ_API void nifuzz_exec_write(nifuzz_exec* exec, nifuzz_stream stream, const uint8_t* data,
                                  size_t len);
NIFUZZ_API void nifuzz_exec_hit(nifuzz_exec* exec, uint64_t branch_id);

#ifdef __cplusplus
}
#endif

#endif /* NIFUZZ_NIFUZZ_H_ */
