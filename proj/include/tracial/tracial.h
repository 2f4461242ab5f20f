// Copyright 2026 The tracial Authors
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

/*
 * C interface to the tracial library.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns a tracial_status; on failure tracial_last_error()
 * describes the problem for the calling thread. Strings returned through
 * char** out-parameters are heap allocated and must be released with
 * tracial_string_free(). Structured results are JSON, tables are CSV.
 */
#ifndef TRACIAL_TRACIAL_H
#define TRACIAL_TRACIAL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TRACIAL_BUILDING)
#define TRACIAL_API __declspec(dllexport)
#else
#define TRACIAL_API __declspec(dllimport)
#endif
#else
#define TRACIAL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tracial_status {
  TRACIAL_OK = 0,
  TRACIAL_ERR_INTERNAL = 1,
  TRACIAL_ERR_INVALID = 2,   /* input validation failure */
  TRACIAL_ERR_NUMERICAL = 3, /* numerical failure */
} tracial_status;

typedef struct tracial_game tracial_game;
typedef struct tracial_algebra tracial_algebra;
typedef struct tracial_sentence tracial_sentence;

typedef struct tracial_optimizer_config {
  size_t restarts;
  size_t max_iterations;
  double tolerance;
  uint64_t seed;
  unsigned threads;
} tracial_optimizer_config;

TRACIAL_API const char* tracial_version(void);
/* Message of the last failed call on this thread, "" if none. */
TRACIAL_API const char* tracial_last_error(void);
TRACIAL_API void tracial_string_free(char* s);

/* Defaults: 32 restarts, 500 iterations, tolerance 1e-8, seed 0, 1 thread. */
TRACIAL_API void tracial_optimizer_config_init(tracial_optimizer_config* cfg);

/* ---- games ---- */
TRACIAL_API tracial_status tracial_game_from_json(const char* json, tracial_game** out);
/* Names from the benchmark corpus, e.g. "triangle". */
TRACIAL_API tracial_status tracial_game_builtin(const char* name, tracial_game** out);
/* {"n", "m", "hash", "game"} */
TRACIAL_API tracial_status tracial_game_info(const tracial_game* game, char** json_out);
TRACIAL_API void tracial_game_free(tracial_game* game);

/* ---- algebras ---- */
TRACIAL_API tracial_status tracial_algebra_from_json(const char* json, int normalize, tracial_algebra** out);
/* Weights are rational strings "p/q". */
TRACIAL_API tracial_status tracial_algebra_from_blocks(const size_t* dims, const char* const* weights, size_t count,
                                                       int normalize, tracial_algebra** out);
TRACIAL_API tracial_status tracial_algebra_describe(const tracial_algebra* algebra, char** out);
TRACIAL_API void tracial_algebra_free(tracial_algebra* algebra);

/* ---- sentences ---- */
/* Accepts a bare sentence or a sentence file with "; key value" headers.
 * const_bound is a rational string bounding (const q) literals; NULL means 1. */
TRACIAL_API tracial_status tracial_sentence_parse(const char* text, const char* const_bound, tracial_sentence** out);
TRACIAL_API tracial_status tracial_sentence_print(const tracial_sentence* sentence, char** out);
/* {"restricted", "reason", "witness_path", "quantifier_free", "universal", "binders",
 *  "lipschitz_body", "metadata"} */
TRACIAL_API tracial_status tracial_sentence_info(const tracial_sentence* sentence, char** json_out);
TRACIAL_API void tracial_sentence_free(tracial_sentence* sentence);

/* ---- compilation ---- */
/* penalty: "linear C" or breakpoints "t:v t:v ..."; NULL selects linear 100.
 * expand_sugar != 0 emits the polarisation expansion of trace atoms.
 * file_out receives the sentence file, info_out (optional) a JSON summary. */
TRACIAL_API tracial_status tracial_compile_game(const tracial_game* game, const char* penalty, int expand_sugar,
                                                char** file_out, char** info_out);
/* constructor: only "demo" is available. */
TRACIAL_API tracial_status tracial_compile_tm(const char* tm_json, const char* constructor, const char* penalty,
                                              int expand_sugar, char** file_out, char** info_out);
/* eta: positive rational string. {"sentence", "budget", "restricted"} */
TRACIAL_API tracial_status tracial_restrict_sentence(const tracial_sentence* sentence, const char* eta,
                                                     char** json_out);

/* ---- values ---- */
TRACIAL_API tracial_status tracial_classical_value(const tracial_game* game, uint64_t cap, unsigned threads,
                                                   char** json_out);
TRACIAL_API tracial_status tracial_seesaw_value(const tracial_game* game, const tracial_algebra* algebra,
                                                const tracial_optimizer_config* cfg, int include_witness,
                                                char** json_out);
/* use_pvm_shape: 1 uses the sentence's pvm-shape header when present. */
TRACIAL_API tracial_status tracial_sentence_maximize(const tracial_sentence* sentence, const tracial_algebra* algebra,
                                                     const tracial_optimizer_config* cfg, int use_pvm_shape,
                                                     int include_witness, char** json_out);
/* Evaluates a quantifier-free sentence, or the body of a universal sentence
 * at the witness given as a JSON array of elements. */
TRACIAL_API tracial_status tracial_sentence_eval(const tracial_sentence* sentence, const tracial_algebra* algebra,
                                                 const char* witness_json, char** json_out);

/* ---- experiments ---- */
/* {"csv", "rows", "summary"} */
TRACIAL_API tracial_status tracial_stability(unsigned m, const size_t* dims, size_t ndims, size_t trials,
                                             uint64_t seed, unsigned threads, char** json_out);
TRACIAL_API tracial_status tracial_modulus(size_t n, size_t m, const size_t* dims, size_t ndims, const double* eps,
                                           size_t neps, size_t trials, uint64_t seed, unsigned threads,
                                           char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* TRACIAL_TRACIAL_H */
