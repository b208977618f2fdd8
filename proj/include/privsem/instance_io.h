// Copyright 2026 The Privsem Authors
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

// JSON instance files.
//
// Single-task:
//   {"version": 1, "mode": "single",
//    "variables": [{"name": "S", "symbols": [...]}, {"name": "X", ...}],
//    "private": "S",                      (optional, default: first variable)
//    "joint": ["1/4", ...] or [0.25, ...], row-major, first variable outermost
//    "f": [numbers], one per cell of the non-private variables
//    "h": [labels],  one per cell of the non-private variables
//    "epsilon": 0.1, "seed": 7}           (seed optional)
//
// Multi-task:
//   {"version": 1, "mode": "multi",
//    "components": [{"s_symbols": [...], "x_symbols": [...], "joint": [...]}],
//    "tasks": [[1], [1, 2]],              1-based component indices
//    "weights": [1, 1], "epsilon": 0.1}

#ifndef PRIVSEM_INSTANCE_IO_H_
#define PRIVSEM_INSTANCE_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "privsem/multi_task.h"
#include "privsem/single_task.h"

namespace privsem {

inline constexpr int kInstanceVersion = 1;

struct ParsedInstance {
  std::string mode;  // "single" or "multi"
  std::optional<InstanceSingle> single;
  std::optional<InstanceMulti> multi;
  std::optional<std::uint64_t> seed;
  nlohmann::json source;
};

// Throws Error with kParseError for malformed files and kValidationError
// when the content is rejected by the library; both name the field.
ParsedInstance ParseInstanceText(std::string_view text);
ParsedInstance ParseInstanceFile(const std::string& path);

// Copy of a single-task instance with another budget.
InstanceSingle WithEpsilon(const InstanceSingle& instance, double epsilon);

}  // namespace privsem

#endif  // PRIVSEM_INSTANCE_IO_H_
