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

#include "core/drift_mle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pufsim {

namespace {

// Solves A x = b for a small symmetric system by Gaussian elimination with
// partial pivoting. Near-singular pivots (collinear or constant inputs) get
// their variable dropped (coefficient forced to zero) instead of blowing up.
std::vector<double> solve_dropping_degenerate(std::vector<std::vector<double>> a,
                                              std::vector<double> b) {
  const std::size_t n = b.size();
  double scale = 0.0;
  for (const auto& row : a)
    for (double v : row) scale = std::max(scale, std::abs(v));
  const double pivot_floor = scale * 1e-12;

  std::vector<double> x(n, 0.0);
  std::vector<bool> dropped(n, false);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) <= pivot_floor) {
      dropped[col] = true;
      for (std::size_t r = 0; r < n; ++r) a[r][col] = 0.0;
      a[col][col] = 1.0;
      b[col] = 0.0;
      continue;
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = n; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
    x[i] = acc / a[i][i];
  }
  for (std::size_t i = 0; i < n; ++i)
    if (dropped[i]) x[i] = 0.0;
  return x;
}

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::strtod(s.substr(pos, next - pos).c_str(), nullptr));
    pos = next + 1;
  }
  return out;
}

}  // namespace

double ve_distance(const ErrorVector& observed, const ErrorVector& predicted) {
  if (observed.errors.size() != predicted.errors.size())
    throw Error(ErrorCode::ShapeMismatch, "error vector n_states mismatch");
  double weighted = 0.0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < observed.errors.size(); ++i) {
    const std::uint32_t n_i = observed.occupancies[i];
    if (n_i == 0) continue;
    weighted += n_i * std::abs(observed.errors[i] - predicted.errors[i]);
    total += n_i;
  }
  return total == 0 ? 0.0 : weighted / static_cast<double>(total);
}

PredictorModel::PredictorModel(std::uint16_t n_states, std::uint32_t input_dim,
                               PredictorOptions options)
    : n_states_(n_states), input_dim_(input_dim), options_(options) {
  if (n_states < 2)
    throw Error(ErrorCode::InvalidArgument, "n_states must be >= 2");
  if (options_.capacity == 0)
    throw Error(ErrorCode::InvalidArgument, "history capacity must be >= 1");
  refit();
}

PredictorModel PredictorModel::fit(std::uint16_t n_states,
                                   std::uint32_t input_dim,
                                   std::vector<ObservationRecord> history,
                                   PredictorOptions options) {
  PredictorModel model(n_states, input_dim, options);
  for (const auto& record : history) {
    if (record.inputs.size() != input_dim)
      throw Error(ErrorCode::ShapeMismatch,
                  "observation input dimensionality mismatch");
    if (record.ve.errors.size() != n_states)
      throw Error(ErrorCode::ShapeMismatch, "observation n_states mismatch");
  }
  if (history.size() > options.capacity)
    history.erase(history.begin(),
                  history.end() - static_cast<std::ptrdiff_t>(options.capacity));
  model.history_ = std::move(history);
  model.refit();
  return model;
}

void PredictorModel::refit() {
  mean_ve_.assign(n_states_, 0.0);
  coeff_.assign(n_states_, std::vector<double>(basis_dim(), 0.0));
  affine_active_ = false;
  if (history_.empty()) return;

  for (const auto& record : history_)
    for (std::uint16_t i = 0; i < n_states_; ++i)
      mean_ve_[i] += record.ve.errors[i];
  for (auto& v : mean_ve_) v /= static_cast<double>(history_.size());

  if (history_.size() < options_.min_history) return;

  // Normal equations over the basis row, shared across states.
  const std::size_t dim = basis_dim();
  std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> rows;
  rows.reserve(history_.size());
  for (const auto& record : history_) {
    rows.push_back(basis_row(record.inputs));
    const auto& row = rows.back();
    for (std::size_t p = 0; p < dim; ++p)
      for (std::size_t q = 0; q < dim; ++q) xtx[p][q] += row[p] * row[q];
  }
  for (std::uint16_t i = 0; i < n_states_; ++i) {
    std::vector<double> xty(dim, 0.0);
    for (std::size_t r = 0; r < history_.size(); ++r)
      for (std::size_t p = 0; p < dim; ++p)
        xty[p] += rows[r][p] * history_[r].ve.errors[i];
    coeff_[i] = solve_dropping_degenerate(xtx, std::move(xty));
  }
  affine_active_ = true;
}

std::size_t PredictorModel::basis_dim() const {
  return 1 + input_dim_ +
         ((options_.temperature_hinge && input_dim_ >= 1) ? 1 : 0);
}

std::vector<double> PredictorModel::basis_row(
    std::span<const double> inputs) const {
  std::vector<double> row(basis_dim(), 1.0);
  for (std::uint32_t j = 0; j < input_dim_; ++j) row[j + 1] = inputs[j];
  if (options_.temperature_hinge && input_dim_ >= 1)
    row[input_dim_ + 1] = std::abs(inputs[0] - options_.hinge_reference);
  return row;
}

ErrorVector PredictorModel::predict(std::span<const double> inputs) const {
  if (inputs.size() != input_dim_)
    throw Error(ErrorCode::ShapeMismatch, "input dimensionality mismatch");
  ErrorVector ve;
  ve.errors.resize(n_states_, 0.0);
  ve.occupancies.assign(n_states_, 0);
  if (history_.empty()) return ve;
  if (!affine_active_) {
    ve.errors = mean_ve_;
    return ve;
  }
  const auto row = basis_row(inputs);
  for (std::uint16_t i = 0; i < n_states_; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) v += coeff_[i][j] * row[j];
    ve.errors[i] = std::max(0.0, v);
  }
  return ve;
}

AuthDecision PredictorModel::decide(const ErrorVector& observed,
                                    std::span<const double> inputs,
                                    double threshold) const {
  if (threshold < 0.0)
    throw Error(ErrorCode::InvalidArgument, "threshold must be >= 0");
  if (observed.errors.size() != n_states_)
    throw Error(ErrorCode::ShapeMismatch, "observed n_states mismatch");
  AuthDecision decision;
  decision.predicted_ve = predict(inputs);
  decision.observed_ve = observed;
  decision.distance = ve_distance(observed, decision.predicted_ve);
  decision.threshold = threshold;
  decision.accepted = decision.distance <= threshold;
  return decision;
}

PredictorModel PredictorModel::update(ObservationRecord record) const {
  if (record.inputs.size() != input_dim_)
    throw Error(ErrorCode::ShapeMismatch,
                "observation input dimensionality mismatch");
  if (record.ve.errors.size() != n_states_)
    throw Error(ErrorCode::ShapeMismatch, "observation n_states mismatch");
  PredictorModel next(*this);
  next.history_.push_back(std::move(record));
  if (next.history_.size() > options_.capacity)
    next.history_.erase(next.history_.begin());
  next.refit();
  return next;
}

std::vector<double> PredictorModel::coefficients(std::uint16_t state) const {
  if (state >= n_states_)
    throw Error(ErrorCode::InvalidArgument, "state index out of range");
  return coeff_[state];
}

std::string PredictorModel::export_text() const {
  std::string out = "pufsim-mle-v1\n";
  out += "n_states=" + std::to_string(n_states_) + "\n";
  out += "m=" + std::to_string(input_dim_) + "\n";
  out += "min_history=" + std::to_string(options_.min_history) + "\n";
  out += "capacity=" + std::to_string(options_.capacity) + "\n";
  out += "hinge=" + std::string(options_.temperature_hinge ? "1" : "0") + "\n";
  out += "hinge_reference=" + fmt_full(options_.hinge_reference) + "\n";
  out += "coefficients=";
  if (affine_active_) {
    for (std::uint16_t i = 0; i < n_states_; ++i) {
      if (i) out += ';';
      for (std::size_t j = 0; j < coeff_[i].size(); ++j) {
        if (j) out += ',';
        out += fmt_full(coeff_[i][j]);
      }
    }
  } else {
    out += "none";
  }
  out += "\n";
  out += "history=" + std::to_string(history_.size()) + "\n";
  for (const auto& record : history_) {
    out += std::to_string(record.timestamp);
    out += '|';
    for (std::size_t j = 0; j < record.inputs.size(); ++j) {
      if (j) out += ',';
      out += fmt_full(record.inputs[j]);
    }
    out += '|';
    for (std::size_t j = 0; j < record.ve.errors.size(); ++j) {
      if (j) out += ',';
      out += fmt_full(record.ve.errors[j]);
    }
    out += '|';
    for (std::size_t j = 0; j < record.ve.occupancies.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(record.ve.occupancies[j]);
    }
    out += '\n';
  }
  return out;
}

PredictorModel PredictorModel::import_text(const std::string& text) try {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() -> std::string {
    if (!std::getline(in, line))
      throw Error(ErrorCode::ConfigError, "truncated mle document");
    return line;
  };
  if (next_line() != "pufsim-mle-v1")
    throw Error(ErrorCode::ConfigError, "unrecognized mle document version");
  auto field = [&](const std::string& key) -> std::string {
    std::string l = next_line();
    if (l.rfind(key + "=", 0) != 0)
      throw Error(ErrorCode::ConfigError, "expected field " + key);
    return l.substr(key.size() + 1);
  };
  const auto n_states = static_cast<std::uint16_t>(std::stoul(field("n_states")));
  const auto input_dim = static_cast<std::uint32_t>(std::stoul(field("m")));
  PredictorOptions options;
  options.min_history = static_cast<std::uint32_t>(std::stoul(field("min_history")));
  options.capacity = static_cast<std::uint32_t>(std::stoul(field("capacity")));
  options.temperature_hinge = field("hinge") == "1";
  options.hinge_reference = std::strtod(field("hinge_reference").c_str(), nullptr);
  field("coefficients");  // recomputed from history below
  const auto count = std::stoul(field("history"));

  std::vector<ObservationRecord> history;
  history.reserve(count);
  for (unsigned long r = 0; r < count; ++r) {
    std::string l = next_line();
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (parts.size() < 4) {
      std::size_t next = l.find('|', pos);
      if (next == std::string::npos) next = l.size();
      parts.push_back(l.substr(pos, next - pos));
      pos = next + 1;
    }
    ObservationRecord record;
    record.timestamp = std::stoull(parts[0]);
    record.inputs = parse_doubles(parts[1]);
    record.ve.errors = parse_doubles(parts[2]);
    for (double v : parse_doubles(parts[3]))
      record.ve.occupancies.push_back(static_cast<std::uint32_t>(v));
    if (record.inputs.size() != input_dim ||
        record.ve.errors.size() != n_states ||
        record.ve.occupancies.size() != n_states)
      throw Error(ErrorCode::ConfigError, "malformed mle history record");
    history.push_back(std::move(record));
  }
  return fit(n_states, input_dim, std::move(history), options);
} catch (const Error&) {
  throw;
} catch (const std::exception& e) {
  throw Error(ErrorCode::ConfigError,
              std::string("malformed mle document: ") + e.what());
}

}  // namespace pufsim
