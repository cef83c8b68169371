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

#include "pufsim.h"

#include <cstring>
#include <new>
#include <string>

#include "core/drift_mle.hpp"
#include "core/experiment.hpp"
#include "core/multistate_codec.hpp"
#include "core/reram_model.hpp"

using namespace pufsim;

extern "C" {

struct pufsim_array {
  PufArray inner;
};

struct pufsim_quantizer {
  StateQuantizer inner;
};

struct pufsim_mle {
  PredictorModel inner;
};

}  // extern "C"

namespace {

thread_local std::string g_last_error;

pufsim_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return PUFSIM_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotFound: return PUFSIM_ERR_NOT_FOUND;
    case ErrorCode::ShapeMismatch: return PUFSIM_ERR_SHAPE_MISMATCH;
    case ErrorCode::ProtocolOrder: return PUFSIM_ERR_PROTOCOL_ORDER;
    case ErrorCode::DecryptFailed: return PUFSIM_ERR_DECRYPT_FAILED;
    case ErrorCode::ConfigError: return PUFSIM_ERR_CONFIG;
    case ErrorCode::IoError: return PUFSIM_ERR_IO;
    case ErrorCode::Internal: return PUFSIM_ERR_INTERNAL;
  }
  return PUFSIM_ERR_INTERNAL;
}

pufsim_status fail(pufsim_status status, const char* message) {
  g_last_error = message;
  return status;
}

template <typename Fn>
pufsim_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PUFSIM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PUFSIM_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* pufsim_status_name(pufsim_status status) {
  switch (status) {
    case PUFSIM_OK: return "ok";
    case PUFSIM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PUFSIM_ERR_NOT_FOUND: return "not_found";
    case PUFSIM_ERR_SHAPE_MISMATCH: return "shape_mismatch";
    case PUFSIM_ERR_PROTOCOL_ORDER: return "protocol_order";
    case PUFSIM_ERR_DECRYPT_FAILED: return "decrypt_failed";
    case PUFSIM_ERR_CONFIG: return "config_error";
    case PUFSIM_ERR_IO: return "io_error";
    case PUFSIM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pufsim_last_error(void) { return g_last_error.c_str(); }

pufsim_status pufsim_array_sample(const pufsim_population* population,
                                  const pufsim_drift_law* drift, uint64_t seed,
                                  pufsim_array** array_out) {
  if (!population || !drift || !array_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    PopulationParams params;
    params.mu_pop = population->mu_pop;
    params.sigma_pop = population->sigma_pop;
    params.cell_count = population->cell_count;
    params.sigma_cell_law = SigmaCellLaw::constant(population->sigma_cell);
    DriftLaw law{drift->temp_coefficient, drift->reference_temp_c};
    *array_out = new pufsim_array{sample_array(params, law, seed)};
    return PUFSIM_OK;
  });
}

void pufsim_array_free(pufsim_array* array) { delete array; }

uint32_t pufsim_array_cell_count(const pufsim_array* array) {
  return array ? static_cast<uint32_t>(array->inner.cells.size()) : 0;
}

pufsim_status pufsim_array_measure(const pufsim_array* array, uint32_t cell_id,
                                   const pufsim_env* env, uint64_t seed,
                                   double* volts_out) {
  if (!array || !env || !volts_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Environment environment{env->temperature_c, env->bias_offset_v};
    *volts_out = measure_vset(array->inner, cell_id, environment, seed);
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_array_sweep(const pufsim_array* array,
                                 const pufsim_env* env, uint64_t seed,
                                 double* sweep_out) {
  if (!array || !env || !sweep_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    Environment environment{env->temperature_c, env->bias_offset_v};
    const auto sweep = measure_sweep(array->inner, environment, seed);
    std::memcpy(sweep_out, sweep.data(), sweep.size() * sizeof(double));
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_quantizer_calibrate(const double* sweep, size_t sweep_len,
                                         uint16_t n_states,
                                         pufsim_quantizer** q_out) {
  if (!sweep || !q_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *q_out = new pufsim_quantizer{
        calibrate_quantizer(std::span(sweep, sweep_len), n_states)};
    return PUFSIM_OK;
  });
}

void pufsim_quantizer_free(pufsim_quantizer* quantizer) { delete quantizer; }

uint16_t pufsim_quantizer_states(const pufsim_quantizer* quantizer) {
  return quantizer ? quantizer->inner.n_states : 0;
}

pufsim_status pufsim_quantizer_boundaries(const pufsim_quantizer* quantizer,
                                          double* boundaries_out) {
  if (!quantizer || !boundaries_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  std::memcpy(boundaries_out, quantizer->inner.boundaries.data(),
              quantizer->inner.boundaries.size() * sizeof(double));
  return PUFSIM_OK;
}

pufsim_status pufsim_quantizer_encode(const pufsim_quantizer* quantizer,
                                      const double* sweep, size_t sweep_len,
                                      uint16_t* states_out) {
  if (!quantizer || !sweep || !states_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const StateWord word =
        encode(std::span(sweep, sweep_len), quantizer->inner);
    std::memcpy(states_out, word.states.data(),
                word.states.size() * sizeof(uint16_t));
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_error_vector(const uint16_t* challenge,
                                  const uint16_t* response, size_t word_len,
                                  uint16_t n_states, double* errors_out,
                                  uint32_t* occupancy_out) {
  if (!challenge || !response || !errors_out || !occupancy_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    StateWord c, r;
    c.n_states = r.n_states = n_states;
    c.states.assign(challenge, challenge + word_len);
    r.states.assign(response, response + word_len);
    const ErrorVector ve = error_vector(c, r);
    std::memcpy(errors_out, ve.errors.data(), n_states * sizeof(double));
    std::memcpy(occupancy_out, ve.occupancies.data(),
                n_states * sizeof(uint32_t));
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_ternary_encode(const double* sweep, size_t sweep_len,
                                    double threshold, double margin,
                                    uint8_t* symbols_out) {
  if (!sweep || !symbols_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const TernaryWord word =
        ternary_encode(std::span(sweep, sweep_len), threshold, margin);
    for (size_t i = 0; i < word.symbols.size(); ++i)
      symbols_out[i] = static_cast<uint8_t>(word.symbols[i]);
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_ternary_crp_error(const uint8_t* challenge,
                                       const uint8_t* response,
                                       size_t word_len, double* error_out) {
  if (!challenge || !response || !error_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    TernaryWord c, r;
    c.symbols.reserve(word_len);
    r.symbols.reserve(word_len);
    for (size_t i = 0; i < word_len; ++i) {
      if (challenge[i] > 2 || response[i] > 2)
        throw Error(ErrorCode::InvalidArgument, "ternary symbol out of range");
      c.symbols.push_back(static_cast<Ternary>(challenge[i]));
      r.symbols.push_back(static_cast<Ternary>(response[i]));
    }
    *error_out = ternary_crp_error(c, r);
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_mle_create(uint16_t n_states, uint32_t input_dim,
                                uint32_t min_history, uint32_t capacity,
                                pufsim_mle** mle_out) {
  if (!mle_out) return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    PredictorOptions options{min_history, capacity};
    *mle_out = new pufsim_mle{PredictorModel(n_states, input_dim, options)};
    return PUFSIM_OK;
  });
}

void pufsim_mle_free(pufsim_mle* mle) { delete mle; }

pufsim_status pufsim_mle_observe(pufsim_mle* mle, const double* inputs,
                                 const double* errors,
                                 const uint32_t* occupancy) {
  if (!mle || !inputs || !errors || !occupancy)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ObservationRecord record;
    record.inputs.assign(inputs, inputs + mle->inner.input_dim());
    record.ve.errors.assign(errors, errors + mle->inner.n_states());
    record.ve.occupancies.assign(occupancy,
                                 occupancy + mle->inner.n_states());
    record.timestamp = mle->inner.history().size();
    mle->inner = mle->inner.update(std::move(record));
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_mle_predict(const pufsim_mle* mle, const double* inputs,
                                 double* errors_out) {
  if (!mle || !inputs || !errors_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const ErrorVector ve =
        mle->inner.predict(std::span(inputs, mle->inner.input_dim()));
    std::memcpy(errors_out, ve.errors.data(),
                mle->inner.n_states() * sizeof(double));
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_mle_decide(const pufsim_mle* mle, const double* inputs,
                                const double* observed_errors,
                                const uint32_t* occupancy, double threshold,
                                int* accepted_out, double* distance_out) {
  if (!mle || !inputs || !observed_errors || !occupancy || !accepted_out ||
      !distance_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    ErrorVector observed;
    observed.errors.assign(observed_errors,
                           observed_errors + mle->inner.n_states());
    observed.occupancies.assign(occupancy, occupancy + mle->inner.n_states());
    const AuthDecision decision = mle->inner.decide(
        observed, std::span(inputs, mle->inner.input_dim()), threshold);
    *accepted_out = decision.accepted ? 1 : 0;
    *distance_out = decision.distance;
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_mle_export_text(const pufsim_mle* mle, char** text_out) {
  if (!mle || !text_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const std::string text = mle->inner.export_text();
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *text_out = buffer;
    return PUFSIM_OK;
  });
}

pufsim_status pufsim_mle_import_text(const char* text, pufsim_mle** mle_out) {
  if (!text || !mle_out)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *mle_out = new pufsim_mle{PredictorModel::import_text(text)};
    return PUFSIM_OK;
  });
}

void pufsim_string_free(char* text) { delete[] text; }

pufsim_status pufsim_run_command(const char* command, const char* config_path,
                                 int has_seed, uint64_t seed,
                                 const char* out_path_or_null) {
  if (!command || !config_path)
    return fail(PUFSIM_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    CmdOverrides overrides;
    if (has_seed) overrides.seed = seed;
    if (out_path_or_null) overrides.out_path = std::string(out_path_or_null);
    run_command(command, config_path, overrides);
    return PUFSIM_OK;
  });
}

}  // extern "C"
