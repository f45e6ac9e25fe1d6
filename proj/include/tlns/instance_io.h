// Copyright 2026 The TLNS Authors
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

#ifndef TLNS_INSTANCE_IO_H_
#define TLNS_INSTANCE_IO_H_

#include <string>
#include <string_view>

#include "tlns/milp.h"

namespace tlns {

// Instance files are JSON objects tagged format_version "tlns-1":
//
//   {"format_version": "tlns-1", "name": ..., "n": ..., "m": ...,
//    "sense": ["LE"|"GE"|"EQ", ...], "b": [...], "c": [...], "l": [...],
//    "u": [...], "is_integer": [true|false, ...],
//    "rows": [{"cols": [...], "vals": [...]}, ...]}
//
// Doubles are written in shortest round-trip form; on input a number may
// also be given as a decimal string. Every array is length-checked.
inline constexpr std::string_view kInstanceFormat = "tlns-1";

std::string InstanceToJson(const MilpInstance& model);
MilpInstance InstanceFromJson(std::string_view text);

void WriteInstance(const MilpInstance& model, const std::string& path);
MilpInstance ReadInstance(const std::string& path);

}  // namespace tlns

#endif  // TLNS_INSTANCE_IO_H_
