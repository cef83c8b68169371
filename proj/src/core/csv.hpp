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

#ifndef PUFSIM_CORE_CSV_HPP
#define PUFSIM_CORE_CSV_HPP

#include <cstdint>
#include <string>

namespace pufsim::csv {

// Number formatting shared by every CSV/export writer so identical runs
// produce byte-identical files.
std::string number(double v);
std::string number(std::uint64_t v);
std::string number(std::int64_t v);

}  // namespace pufsim::csv

#endif
