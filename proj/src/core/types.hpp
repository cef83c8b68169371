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

#ifndef PUFSIM_CORE_TYPES_HPP
#define PUFSIM_CORE_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pufsim {

using Bytes = std::vector<std::uint8_t>;

enum class ErrorCode {
  InvalidArgument,
  NotFound,
  ShapeMismatch,
  ProtocolOrder,
  DecryptFailed,
  ConfigError,
  IoError,
  Internal,
};

/// Single exception type carried across all modules; the C API maps
/// ErrorCode onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

/// Half-open range of cell indices [begin, end) within a PufArray.
struct CellRange {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t count() const { return end > begin ? end - begin : 0; }
  bool overlaps(const CellRange& other) const {
    return begin < other.end && other.begin < end;
  }
};

}  // namespace pufsim

#endif
