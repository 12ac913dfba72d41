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

#ifndef EEPROF_ORACLE_H_
#define EEPROF_ORACLE_H_

// Oracle early-exit decoding and threshold search.
//
// At every step the oracle runs all layers, then exits at the earliest layer
// whose similarity to the final layer reaches delta (falling back to full
// depth) and emits the argmax of that layer's logits. Because the final
// layer is consulted, this bounds what a real exit criterion could achieve.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eeprof/evaluators.h"
#include "eeprof/model.h"
#include "eeprof/signals.h"
#include "eeprof/transformer.h"

namespace eeprof {

struct OracleParams {
  double delta = 0.9;
  Signal signal = Signal::OutputLogits();
  int max_tokens = 1024;
  SignalOptions signal_options;
  LensOptions lens;

  void Validate() const;
};

struct ExitTranscript {
  std::string prompt_id;
  int num_layers = 0;
  std::vector<TokenId> tokens;
  std::vector<int> exit_layers;         // k* per token, in 1..L
  std::vector<double> exit_similarity;  // similarity at k*
  std::vector<int64_t> exit_histogram;  // index k - 1
  double mean_skip_ratio = 0.0;
  bool stopped_on_eos = false;
  bool truncated = false;
};

// Rendered, byte-tokenized prompt for `item`.
std::vector<TokenId> EncodeItem(const Model& model, const TaskItem& item);

// Earliest 1-based layer whose similarity is >= delta; the last layer if none.
int ExitLayer(std::span<const double> layer_similarities, double delta);

ExitTranscript OracleDecode(const Model& model, std::span<const TokenId> prompt,
                            const OracleParams& params,
                            std::string prompt_id = "");

// Full-depth greedy decoding of a dataset, scored once and reused across
// thresholds.
struct FullDepthResults {
  std::vector<std::string> prompt_ids;
  std::vector<std::string> prompts;
  std::vector<std::vector<TokenId>> generations;
  std::vector<std::string> predictions;
  EvalReport eval;
};

FullDepthResults RunFullDepth(const Model& model,
                              std::span<const TaskItem> items,
                              const Evaluator& evaluator, int max_tokens,
                              int workers = 1, const LensOptions& lens = {});

struct OracleReport {
  double delta = 0.0;
  Signal signal;
  int64_t num_prompts = 0;
  int64_t full_correct = 0;
  int64_t early_exit_correct = 0;
  double full_accuracy = 0.0;        // fraction in [0, 1]
  double early_exit_accuracy = 0.0;  // fraction in [0, 1]
  double accuracy_loss = 0.0;        // full - early exit, absolute
  double skip_percent = 0.0;         // pooled over all generated tokens
  int64_t generated_tokens = 0;
  std::vector<int64_t> exit_histogram;
  std::vector<std::string> prompt_ids;
  EvalReport early_exit_eval;
  std::vector<ExitTranscript> transcripts;
};

// Runs oracle decoding on every item and scores it against `full`, which
// must come from RunFullDepth over the same items.
OracleReport EvaluateAtThreshold(const Model& model,
                                 std::span<const TaskItem> items,
                                 const OracleParams& params,
                                 const Evaluator& evaluator,
                                 const FullDepthResults& full,
                                 int workers = 1);

struct SearchResult {
  size_t best_index = 0;
  double best_delta = 0.0;
  bool feasible = false;
  double max_loss = 0.0;
  std::vector<OracleReport> reports;  // one per grid point, grid order

  const OracleReport& best() const { return reports[best_index]; }
};

// Picks the report with maximal skip among those with accuracy_loss <=
// max_loss, preferring the larger delta on ties. When none qualifies the
// largest-delta report is returned with feasible = false. Reports must be in
// ascending delta order.
SearchResult SelectThreshold(std::vector<OracleReport> reports,
                             double max_loss);

// Evaluates every grid point (ascending, non-empty) and selects.
SearchResult ThresholdSearch(const Model& model,
                             std::span<const TaskItem> items,
                             std::span<const double> grid, double max_loss,
                             const OracleParams& base,
                             const Evaluator& evaluator,
                             const FullDepthResults& full, int workers = 1);

// lo, lo + step, ..., hi (inclusive up to rounding), rounded to 1e-9.
std::vector<double> MakeGrid(double lo, double hi, double step);

}  // namespace eeprof

#endif  // EEPROF_ORACLE_H_
