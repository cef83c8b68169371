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

#include "core/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace pufsim {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (errno != 0 || end == value.c_str() || *end != '\0')
    throw Error(ErrorCode::ConfigError,
                "config key " + key + " has a malformed number: " + value);
  return v;
}

}  // namespace

KvConfig KvConfig::parse_text(const std::string& text) {
  KvConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::ConfigError,
                  "config line " + std::to_string(lineno) + " lacks '='");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw Error(ErrorCode::ConfigError,
                  "config line " + std::to_string(lineno) + " has empty key");
    if (!config.values_.emplace(key, value).second)
      throw Error(ErrorCode::ConfigError, "duplicate config key: " + key);
  }
  return config;
}

KvConfig KvConfig::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

std::string KvConfig::get_string(const std::string& key,
                                 const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KvConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  return parse_double(key, it->second);
}

std::uint64_t KvConfig::get_u64(const std::string& key,
                                std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (errno != 0 || end == it->second.c_str() || *end != '\0')
    throw Error(ErrorCode::ConfigError,
                "config key " + key + " has a malformed integer: " + it->second);
  return v;
}

std::vector<double> KvConfig::get_double_list(const std::string& key) const {
  auto it = values_.find(key);
  std::vector<double> out;
  if (it == values_.end()) return out;
  std::size_t pos = 0;
  const std::string& s = it->second;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    const std::string item = trim(s.substr(pos, next - pos));
    if (!item.empty()) out.push_back(parse_double(key, item));
    pos = next + 1;
  }
  return out;
}

std::vector<std::pair<double, double>> KvConfig::get_pair_list(
    const std::string& key) const {
  auto it = values_.find(key);
  std::vector<std::pair<double, double>> out;
  if (it == values_.end()) return out;
  std::size_t pos = 0;
  const std::string& s = it->second;
  while (pos <= s.size()) {
    std::size_t next = s.find(',', pos);
    if (next == std::string::npos) next = s.size();
    const std::string item = trim(s.substr(pos, next - pos));
    pos = next + 1;
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw Error(ErrorCode::ConfigError,
                  "config key " + key + " expects a:b pairs");
    out.emplace_back(parse_double(key, trim(item.substr(0, colon))),
                     parse_double(key, trim(item.substr(colon + 1))));
  }
  return out;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::string KvConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  return out;
}

void KvConfig::require_known(const std::vector<std::string>& known_keys) const {
  for (const auto& [key, value] : values_) {
    if (std::find(known_keys.begin(), known_keys.end(), key) ==
        known_keys.end())
      throw Error(ErrorCode::ConfigError, "unknown config key: " + key);
  }
}

}  // namespace pufsim
