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

#ifndef EEPROF_PIPELINE_H_
#define EEPROF_PIPELINE_H_

// End-to-end runs: render prompts -> decode/capture (or replay) -> signals
// -> adaptability / oracle -> evaluators -> report files.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "eeprof/adaptability.h"
#include "eeprof/dataset.h"
#include "eeprof/model.h"
#include "eeprof/oracle.h"
#include "eeprof/report.h"
#include "eeprof/signals.h"
#include "eeprof/trace_archive.h"

namespace eeprof {

enum class Command { kProfile, kEas, kOracle, kSearch, kEval, kReplay };

std::string ToString(Command c);
Command ParseCommand(const std::string& s);

struct RunConfig {
  std::string model_path = "fixture";  // "fixture" builds the test model
  std::string dataset_path;
  TaskKind task = TaskKind::kGsm8k;
  size_t subset_n = 100;
  std::string seed = "paper";
  int max_tokens = 1024;
  int topk = 10;
  Signal signal = Signal::OutputLogits();  // EAS and oracle signal
  double alpha = 0.5;
  double delta = 0.9;
  double grid_lo = 0.5;
  double grid_hi = 1.0;
  double grid_step = 0.01;
  double max_loss = 0.05;
  CaptureLevel capture = CaptureLevel::kFull;
  double epsilon = 1e-6;
  std::string trace_path;  // replay input
  std::string trace_out;   // optional archive written by profile / eas
  std::filesystem::path out_dir = "eeprof_out";
  int workers = 1;
  bool lens_final_norm = true;
  bool logits_as_probabilities = false;

  // Throws ValidationError.
  void Validate(Command command) const;
};

struct RunResult {
  std::vector<std::filesystem::path> files;
  Json summary;
};

Model LoadModelOrFixture(const std::string& path);

// Loads the dataset and applies seeded subset selection.
std::vector<TaskItem> LoadSubset(const RunConfig& config);
std::string DatasetId(const RunConfig& config);

// Signals a capture level supports.
std::vector<Signal> SignalsForCapture(CaptureLevel capture, int k);

struct LiveProfile {
  SimilarityProfile profile;
  std::optional<TraceArchive> archive;  // when keep_traces
};

// Greedy-decodes every item, capturing at config.capture, and aggregates
// every supported signal.
LiveProfile ProfileLive(const Model& model, const std::vector<TaskItem>& items,
                        const RunConfig& config, const std::string& dataset_id,
                        bool keep_traces);

// Aggregates every signal the archive supports.
SimilarityProfile ProfileArchive(const TraceArchive& archive, int k,
                                 const SignalOptions& options = {});

RunResult Run(const RunConfig& config, Command command);

}  // namespace eeprof

#endif  // EEPROF_PIPELINE_H_
