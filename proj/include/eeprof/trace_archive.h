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

#ifndef EEPROF_TRACE_ARCHIVE_H_
#define EEPROF_TRACE_ARCHIVE_H_

// Versioned on-disk capture of per-layer step traces, so similarity and EAS
// can be recomputed offline or for models this runtime cannot execute.
//
// Layout (all integers little-endian):
//   "EEPTRACE"                 8-byte magic
//   u32 version                currently 1
//   u32 manifest_bytes
//   manifest                   UTF-8 JSON, see TraceArchiveHeader
//   per step:
//     u32 step, u32 chosen_token
//     per layer 1..L:
//       f32[d_model] hidden     (capture "full" only)
//       f32[vocab]   logits     (capture "full" only)
//       u32[K] ids, f32[K] values   top-K digest
// The file ends exactly after the last record.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eeprof/step_trace.h"

namespace eeprof {

struct TracePromptSpan {
  std::string id;
  int64_t steps = 0;
};

struct TraceArchiveHeader {
  std::string model_id;
  std::string dataset_id;  // optional
  int num_layers = 0;
  int d_model = 0;
  int vocab_size = 0;
  CaptureLevel capture = CaptureLevel::kFull;
  int topk = 10;
  int64_t step_count = 0;
  // Optional grouping of consecutive steps by prompt; empty or summing to
  // step_count.
  std::vector<TracePromptSpan> prompts;
};

struct TraceArchive {
  TraceArchiveHeader header;
  std::vector<StepTrace> steps;
};

constexpr uint32_t kTraceArchiveVersion = 1;

// Serializes `archive`. Throws ValidationError if any step disagrees with the
// header's dimensions or capture level. step_count is taken from steps.
std::string EncodeTraceArchive(const TraceArchive& archive);
TraceArchive DecodeTraceArchive(const std::string& bytes);

void WriteTraceArchive(const std::filesystem::path& path,
                       const TraceArchive& archive);
TraceArchive ReadTraceArchive(const std::filesystem::path& path);

}  // namespace eeprof

#endif  // EEPROF_TRACE_ARCHIVE_H_
