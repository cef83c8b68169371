/*
  Copyright (c) the pufsim authors

  Licensed under the Apache License, Version 2.0 (the "License");
  you may not use this file except in compliance with the License.
  You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

  Unless required by applicable law or agreed to in writing, software
  distributed under the License is distributed on an "AS IS" BASIS,
  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
  See the License for the specific language governing permissions and
  limitations under the License.
*/

/*
  C API of the pufsim shared library.

  Conventions: every fallible function returns a pufsim_status; results come
  back through out-parameters. Opaque handles are freed with their matching
  *_free function. On failure pufsim_last_error() returns a thread-local
  human-readable message describing the most recent error.
*/

#ifndef PUFSIM_H
#define PUFSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PUFSIM_API __declspec(dllexport)
#else
#define PUFSIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pufsim_status {
  PUFSIM_OK = 0,
  PUFSIM_ERR_INVALID_ARGUMENT = 1,
  PUFSIM_ERR_NOT_FOUND = 2,
  PUFSIM_ERR_SHAPE_MISMATCH = 3,
  PUFSIM_ERR_PROTOCOL_ORDER = 4,
  PUFSIM_ERR_DECRYPT_FAILED = 5,
  PUFSIM_ERR_CONFIG = 6,
  PUFSIM_ERR_IO = 7,
  PUFSIM_ERR_INTERNAL = 8,
} pufsim_status;

PUFSIM_API const char* pufsim_status_name(pufsim_status status);

/* Thread-local message for the most recent failure in this thread. */
PUFSIM_API const char* pufsim_last_error(void);

/* ---- simulated ReRAM arrays ------------------------------------------- */

typedef struct pufsim_array pufsim_array;

typedef struct pufsim_population {
  double mu_pop;        /* population mean set voltage, volts */
  double sigma_pop;     /* population standard deviation, volts */
  uint32_t cell_count;
  double sigma_cell;    /* constant intra-cell noise sigma, volts */
} pufsim_population;

typedef struct pufsim_drift_law {
  double temp_coefficient; /* volts per degree Celsius, negative */
  double reference_temp_c;
} pufsim_drift_law;

typedef struct pufsim_env {
  double temperature_c;
  double bias_offset_v;
} pufsim_env;

PUFSIM_API pufsim_status pufsim_array_sample(const pufsim_population* population,
                                             const pufsim_drift_law* drift,
                                             uint64_t seed,
                                             pufsim_array** array_out);
PUFSIM_API void pufsim_array_free(pufsim_array* array);
PUFSIM_API uint32_t pufsim_array_cell_count(const pufsim_array* array);

PUFSIM_API pufsim_status pufsim_array_measure(const pufsim_array* array,
                                              uint32_t cell_id,
                                              const pufsim_env* env,
                                              uint64_t seed, double* volts_out);

/* sweep_out must hold cell_count doubles. */
PUFSIM_API pufsim_status pufsim_array_sweep(const pufsim_array* array,
                                            const pufsim_env* env,
                                            uint64_t seed, double* sweep_out);

/* ---- multi-state encoding --------------------------------------------- */

typedef struct pufsim_quantizer pufsim_quantizer;

PUFSIM_API pufsim_status pufsim_quantizer_calibrate(const double* sweep,
                                                    size_t sweep_len,
                                                    uint16_t n_states,
                                                    pufsim_quantizer** q_out);
PUFSIM_API void pufsim_quantizer_free(pufsim_quantizer* quantizer);
PUFSIM_API uint16_t pufsim_quantizer_states(const pufsim_quantizer* quantizer);

/* boundaries_out must hold n_states - 1 doubles. */
PUFSIM_API pufsim_status pufsim_quantizer_boundaries(
    const pufsim_quantizer* quantizer, double* boundaries_out);

/* states_out must hold sweep_len entries. */
PUFSIM_API pufsim_status pufsim_quantizer_encode(const pufsim_quantizer* quantizer,
                                                 const double* sweep,
                                                 size_t sweep_len,
                                                 uint16_t* states_out);

/* Per-state average absolute state error, grouped by challenge state.
   errors_out and occupancy_out must hold n_states entries. */
PUFSIM_API pufsim_status pufsim_error_vector(const uint16_t* challenge,
                                             const uint16_t* response,
                                             size_t word_len, uint16_t n_states,
                                             double* errors_out,
                                             uint32_t* occupancy_out);

/* Ternary classification: 0, 1, or 2 (= X). */
PUFSIM_API pufsim_status pufsim_ternary_encode(const double* sweep,
                                               size_t sweep_len,
                                               double threshold, double margin,
                                               uint8_t* symbols_out);

PUFSIM_API pufsim_status pufsim_ternary_crp_error(const uint8_t* challenge,
                                                  const uint8_t* response,
                                                  size_t word_len,
                                                  double* error_out);

/* ---- drift predictor --------------------------------------------------- */

typedef struct pufsim_mle pufsim_mle;

PUFSIM_API pufsim_status pufsim_mle_create(uint16_t n_states,
                                           uint32_t input_dim,
                                           uint32_t min_history,
                                           uint32_t capacity,
                                           pufsim_mle** mle_out);
PUFSIM_API void pufsim_mle_free(pufsim_mle* mle);

PUFSIM_API pufsim_status pufsim_mle_observe(pufsim_mle* mle,
                                            const double* inputs,
                                            const double* errors,
                                            const uint32_t* occupancy);

/* errors_out must hold n_states doubles. */
PUFSIM_API pufsim_status pufsim_mle_predict(const pufsim_mle* mle,
                                            const double* inputs,
                                            double* errors_out);

PUFSIM_API pufsim_status pufsim_mle_decide(const pufsim_mle* mle,
                                           const double* inputs,
                                           const double* observed_errors,
                                           const uint32_t* occupancy,
                                           double threshold, int* accepted_out,
                                           double* distance_out);

/* Versioned text document; free with pufsim_string_free. */
PUFSIM_API pufsim_status pufsim_mle_export_text(const pufsim_mle* mle,
                                                char** text_out);
PUFSIM_API pufsim_status pufsim_mle_import_text(const char* text,
                                                pufsim_mle** mle_out);
PUFSIM_API void pufsim_string_free(char* text);

/* ---- experiment commands (the CLI surface) ----------------------------- */

/* Runs one experiment command against a key=value config file and writes its
   output files. command is one of "distribution", "drift", "sigma-ratio",
   "protocol". Passing has_seed/has_out overrides the config's seed and
   output path. */
PUFSIM_API pufsim_status pufsim_run_command(const char* command,
                                            const char* config_path,
                                            int has_seed, uint64_t seed,
                                            const char* out_path_or_null);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PUFSIM_H */
