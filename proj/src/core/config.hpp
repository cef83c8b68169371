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

#ifndef PUFSIM_CORE_CONFIG_HPP
#define PUFSIM_CORE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace pufsim {

/// Flat key=value document with dotted section prefixes
/// (e.g. population.mu=2.1). '#' starts a comment; blank lines are ignored;
/// duplicate keys are an error.
class KvConfig {
 public:
  static KvConfig parse_text(const std::string& text);
  static KvConfig load_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;

  /// Pairs like "a:b,c:d" used for grids and tables.
  std::vector<std::pair<double, double>> get_pair_list(
      const std::string& key) const;

  void set(const std::string& key, const std::string& value);

  /// Canonical form: sorted key=value lines. parse(serialize(x)) == x.
  std::string serialize() const;

  /// Rejects keys outside the recognized set (typo safety).
  void require_known(const std::vector<std::string>& known_keys) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace pufsim

#endif
