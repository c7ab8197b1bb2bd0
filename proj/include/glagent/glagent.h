// Copyright 2026 The glagent Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* glagent C API.
 *
 * Every entry point takes a context and reports a status. Results and error
 * text stay owned by the context and remain valid until the next call on it
 * or until it is destroyed. Options are passed as JSON object strings.
 */
#ifndef GLAGENT_GLAGENT_H_
#define GLAGENT_GLAGENT_H_

#if defined(GLAGENT_BUILDING_LIBRARY)
#define GLAGENT_API __attribute__((visibility("default")))
#else
#define GLAGENT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct glagent_context glagent_context;

typedef enum glagent_status {
  GLAGENT_OK = 0,
  /* Unreadable or malformed input: options, files, schemas. */
  GLAGENT_INVALID_ARGUMENT = 1,
  GLAGENT_ERROR = 2,
  /* A pipeline stage failed; see glagent_failed_stage. */
  GLAGENT_STAGE_FAILURE = 3,
  GLAGENT_SPACE_TOO_LARGE = 4
} glagent_status;

GLAGENT_API glagent_context* glagent_context_create(void);
GLAGENT_API void glagent_context_destroy(glagent_context* ctx);

GLAGENT_API const char* glagent_version(void);

/* {"instruction": path, "config": path, "backend": "mock"|"http",
 *  "fixtures": path, "seed": n, "out": dir}. Only instruction and config
 * are required; the others override the config file. */
GLAGENT_API glagent_status glagent_run(glagent_context* ctx, const char* options_json);

/* {"corpus": path, "gold": path, "fixtures": path, "backend": "mock"|"http",
 *  "paper_only": bool, "seed": n}. */
GLAGENT_API glagent_status glagent_bench_robustness(glagent_context* ctx, const char* options_json);

GLAGENT_API glagent_status glagent_cost_report(glagent_context* ctx, const char* bundle_path);

/* {"space": path, "limit": n, "eval": bool, "config": path}. */
GLAGENT_API glagent_status glagent_enumerate(glagent_context* ctx, const char* options_json);

/* Error detail of the last failed call, or "". */
GLAGENT_API const char* glagent_last_error(const glagent_context* ctx);
/* Error kind name such as "UnsupportedTask", or "". */
GLAGENT_API const char* glagent_last_error_kind(const glagent_context* ctx);
/* "stage/operation" after GLAGENT_STAGE_FAILURE, otherwise "". */
GLAGENT_API const char* glagent_failed_stage(const glagent_context* ctx);
/* Human-readable and structured output of the last successful call. */
GLAGENT_API const char* glagent_result_text(const glagent_context* ctx);
GLAGENT_API const char* glagent_result_json(const glagent_context* ctx);
/* Warnings produced by the last call, one per line. */
GLAGENT_API const char* glagent_warnings(const glagent_context* ctx);

#ifdef __cplusplus
}
#endif

#endif /* GLAGENT_GLAGENT_H_ */
