// Copyright 2026 The mdiqrng Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MDIQRNG_MDIQRNG_H
#define MDIQRNG_MDIQRNG_H

#include <stddef.h>
#include <stdint.h>

#if defined(MDQ_BUILDING_LIBRARY)
#define MDQ_API __attribute__((visibility("default")))
#else
#define MDQ_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; also the command line tool's exit codes. */
typedef enum mdq_status {
    MDQ_OK = 0,
    MDQ_INVALID_ARGUMENT = 1,
    MDQ_IO = 2,
    MDQ_FORMAT = 3,
    MDQ_SEED_EXHAUSTED = 4,
    MDQ_INFEASIBLE = 5,
    MDQ_INSUFFICIENT_DATA = 6,
    MDQ_NOTHING_TO_EXTRACT = 7,
    MDQ_TEST_FAILED = 8,
    MDQ_DEGENERATE = 9,
    MDQ_INTERNAL = 10
} mdq_status;

typedef enum mdq_functional { MDQ_MIN_ENTROPY = 0, MDQ_SHANNON = 1 } mdq_functional;

typedef struct mdq_config mdq_config;
typedef struct mdq_report mdq_report;

MDQ_API const char *mdq_version(void);
MDQ_API const char *mdq_status_name(int status);
/* Message of the last failure on the calling thread; never NULL. */
MDQ_API const char *mdq_last_error(void);

/* Configuration keys, in a fixed order. */
MDQ_API size_t mdq_config_key_count(void);
MDQ_API const char *mdq_config_key_name(size_t index);
MDQ_API const char *mdq_config_key_default(size_t index);
MDQ_API const char *mdq_config_key_help(size_t index);

MDQ_API mdq_status mdq_config_new(mdq_config **out);
MDQ_API void mdq_config_free(mdq_config *config);
MDQ_API mdq_status mdq_config_load(mdq_config *config, const char *path);
MDQ_API mdq_status mdq_config_set(mdq_config *config, const char *key, const char *value);
/* Copies the value with its terminator into buf when it fits; *needed receives
 * the required size including the terminator. */
MDQ_API mdq_status mdq_config_get(const mdq_config *config, const char *key, char *buf, size_t cap,
                                  size_t *needed);
MDQ_API mdq_status mdq_config_validate(const mdq_config *config);

/* command: "simulate", "certify", "extract", "test" or "pipeline". For "test",
 * bits_path overrides paths.output (may be NULL). A report is produced for
 * every status except MDQ_INVALID_ARGUMENT on bad handles; on failure it
 * carries an "error" object. MDQ_TEST_FAILED marks a completed run whose
 * battery or certificate did not pass. */
MDQ_API mdq_status mdq_run(const mdq_config *config, const char *command, const char *bits_path,
                           mdq_report **out);
/* Pretty-printed JSON, valid until the report is freed. */
MDQ_API const char *mdq_report_json(const mdq_report *report);
MDQ_API int mdq_report_success(const mdq_report *report);
MDQ_API void mdq_report_free(mdq_report *report);

/* Numeric entry points. */
MDQ_API mdq_status mdq_solve_theta(double epsilon, double p, uint64_t n_i, uint64_t n_0, double *theta);
MDQ_API mdq_status mdq_output_length(double n_raw, double rate, double eps_ext, uint64_t *m);
/* trials/ones ordered Z0, Z1, X+, Y+. */
MDQ_API mdq_status mdq_certify_counts(const uint64_t trials[4], const uint64_t ones[4], uint64_t generation_turns,
                                      double epsilon_theta, double mu, mdq_functional functional, double *rate);
/* Little-endian packed bits: raw holds n bits, seed m+n-1 bits, out ceil(m/8) bytes. */
MDQ_API mdq_status mdq_toeplitz_extract(const uint8_t *raw, size_t n, const uint8_t *seed, size_t m, uint8_t *out);

#ifdef __cplusplus
}
#endif

#endif
