// Copyright 2026 The eeprof Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EEPROF_DATASET_H_
#define EEPROF_DATASET_H_

// Line-delimited JSON datasets and seeded subset selection.
//
// One object per line; blank lines are skipped. Fields by task:
//   gsm8k      question, answer|reference   ("... #### 72" answers keep
//                                            the text after the last ####)
//   mmlu       input|question, A, B, C, D, answer|reference|target
//   gpqa       question, A, B, C, D, answer|reference|target
//   humaneval  prompt, canonical_solution|reference
// An optional "id" (string or integer) names the item; otherwise the
// 1-based line number is used.

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "eeprof/evaluators.h"
#include "eeprof/sha256.h"

namespace eeprof {

std::vector<TaskItem> ParseDataset(std::string_view content, TaskKind task,
                                   const std::string& source = "<memory>");
std::vector<TaskItem> LoadDataset(const std::filesystem::path& path,
                                  TaskKind task);

// SHA-256(seed || 0x1F || id).
Digest SubsetKey(std::string_view seed, std::string_view id);

// Items ordered by SubsetKey, first min(n, size). Independent of input
// order. Throws ValidationError if n < 1.
std::vector<TaskItem> SelectSubset(std::vector<TaskItem> items,
                                   std::string_view seed, size_t n);

}  // namespace eeprof

#endif  // EEPROF_DATASET_H_
