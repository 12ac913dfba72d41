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

#include "eeprof/oracle.h"

#include <cmath>

#include "eeprof/error.h"
#include "eeprof/parallel.h"
#include "eeprof/tensor_ops.h"
#include "eeprof/tokenizer.h"

namespace eeprof {
namespace {

// Slack for comparing accuracy differences built from integer counts.
constexpr double kLossSlack = 1e-12;

void CheckItems(std::span<const TaskItem> items, const Evaluator& evaluator) {
  if (items.empty()) throw ValidationError("dataset is empty");
  for (const TaskItem& item : items) {
    if (!evaluator.Supports(item.task)) {
      throw ValidationError("evaluator " + ToString(evaluator.kind) +
                            " cannot score task '" + ToString(item.task) +
                            "' (item '" + item.id + "')");
    }
  }
}

std::vector<std::string> References(std::span<const TaskItem> items) {
  std::vector<std::string> refs;
  refs.reserve(items.size());
  for (const auto& item : items) refs.push_back(item.reference);
  return refs;
}

}  // namespace

void OracleParams::Validate() const {
  if (max_tokens < 1) throw ValidationError("oracle: max_tokens must be >= 1");
  if (!std::isfinite(delta)) throw ValidationError("oracle: delta must be finite");
}

std::vector<TokenId> EncodeItem(const Model& model, const TaskItem& item) {
  auto ids = ByteTokenizer(model).Encode(RenderPrompt(item.task, item));
  if (ids.empty()) {
    throw ValidationError("item '" + item.id + "': empty prompt");
  }
  if (static_cast<int>(ids.size()) > model.config().max_seq_len) {
    throw ValidationError("item '" + item.id + "': prompt of " +
                          std::to_string(ids.size()) +
                          " tokens exceeds max_seq_len");
  }
  return ids;
}

int ExitLayer(std::span<const double> layer_similarities, double delta) {
  for (size_t i = 0; i < layer_similarities.size(); ++i) {
    if (layer_similarities[i] >= delta) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(layer_similarities.size());
}

ExitTranscript OracleDecode(const Model& model, std::span<const TokenId> prompt,
                            const OracleParams& params, std::string prompt_id) {
  params.Validate();
  const int L = model.config().num_layers;
  ExitTranscript tr;
  tr.prompt_id = std::move(prompt_id);
  tr.num_layers = L;
  tr.exit_histogram.assign(L, 0);

  DecodeSession session(model, prompt, params.lens);
  int64_t skipped_layers = 0;
  for (int t = 0; t < params.max_tokens; ++t) {
    const StepTrace trace = session.Step();
    const auto sims =
        LayerSimilarities(trace, params.signal, params.signal_options);
    const int exit = ExitLayer(sims, params.delta);
    const TokenId token = Argmax(trace.Logits(exit));
    tr.tokens.push_back(token);
    tr.exit_layers.push_back(exit);
    tr.exit_similarity.push_back(sims[exit - 1]);
    ++tr.exit_histogram[exit - 1];
    skipped_layers += L - exit;
    if (token == model.config().eos_token_id) {
      tr.stopped_on_eos = true;
      break;
    }
    if (t + 1 == params.max_tokens) break;
    if (session.AtCapacity()) {
      tr.truncated = true;
      break;
    }
    session.Append(token);
  }
  tr.mean_skip_ratio = static_cast<double>(skipped_layers) /
                       (static_cast<double>(L) * tr.tokens.size());
  return tr;
}

FullDepthResults RunFullDepth(const Model& model,
                              std::span<const TaskItem> items,
                              const Evaluator& evaluator, int max_tokens,
                              int workers, const LensOptions& lens) {
  CheckItems(items, evaluator);
  FullDepthResults out;
  const size_t n = items.size();
  out.prompt_ids.resize(n);
  out.prompts.resize(n);
  out.generations.resize(n);
  out.predictions.resize(n);
  const ByteTokenizer tok(model);
  GenerationOptions opts;
  opts.max_tokens = max_tokens;
  opts.lens = lens;
  ParallelFor(n, workers, [&](size_t i) {
    out.prompt_ids[i] = items[i].id;
    out.prompts[i] = RenderPrompt(items[i].task, items[i]);
    out.generations[i] =
        GreedyDecode(model, EncodeItem(model, items[i]), opts).tokens;
    out.predictions[i] = tok.Decode(out.generations[i]);
  });
  out.eval = evaluator.Score(out.predictions, References(items), out.prompts);
  return out;
}

OracleReport EvaluateAtThreshold(const Model& model,
                                 std::span<const TaskItem> items,
                                 const OracleParams& params,
                                 const Evaluator& evaluator,
                                 const FullDepthResults& full, int workers) {
  params.Validate();
  CheckItems(items, evaluator);
  if (full.prompt_ids.size() != items.size()) {
    throw ValidationError("full-depth results cover " +
                          std::to_string(full.prompt_ids.size()) +
                          " prompts, dataset has " +
                          std::to_string(items.size()));
  }
  for (size_t i = 0; i < items.size(); ++i) {
    if (full.prompt_ids[i] != items[i].id) {
      throw ValidationError("full-depth results do not match dataset at "
                            "item '" + items[i].id + "'");
    }
  }

  const size_t n = items.size();
  const int L = model.config().num_layers;
  std::vector<ExitTranscript> transcripts(n);
  ParallelFor(n, workers, [&](size_t i) {
    transcripts[i] =
        OracleDecode(model, EncodeItem(model, items[i]), params, items[i].id);
  });

  const ByteTokenizer tok(model);
  std::vector<std::string> predictions;
  OracleReport report;
  report.delta = params.delta;
  report.signal = params.signal;
  report.num_prompts = static_cast<int64_t>(n);
  report.exit_histogram.assign(L, 0);
  int64_t skipped_layers = 0;
  for (const ExitTranscript& tr : transcripts) {
    predictions.push_back(tok.Decode(tr.tokens));
    report.prompt_ids.push_back(tr.prompt_id);
    report.generated_tokens += static_cast<int64_t>(tr.tokens.size());
    for (int k : tr.exit_layers) {
      skipped_layers += L - k;
      ++report.exit_histogram[k - 1];
    }
  }
  report.early_exit_eval =
      evaluator.Score(predictions, References(items), full.prompts);
  report.full_correct = full.eval.correct;
  report.early_exit_correct = report.early_exit_eval.correct;
  report.full_accuracy = static_cast<double>(report.full_correct) / n;
  report.early_exit_accuracy =
      static_cast<double>(report.early_exit_correct) / n;
  report.accuracy_loss =
      static_cast<double>(report.full_correct - report.early_exit_correct) / n;
  report.skip_percent =
      100.0 * static_cast<double>(skipped_layers) /
      (static_cast<double>(L) * static_cast<double>(report.generated_tokens));
  report.transcripts = std::move(transcripts);
  return report;
}

SearchResult SelectThreshold(std::vector<OracleReport> reports,
                             double max_loss) {
  if (reports.empty()) throw ValidationError("threshold search: empty grid");
  if (!(max_loss >= 0.0)) {
    throw ValidationError("threshold search: max_loss must be >= 0");
  }
  for (size_t i = 1; i < reports.size(); ++i) {
    if (!(reports[i - 1].delta < reports[i].delta)) {
      throw ValidationError("threshold search: grid must be strictly "
                            "ascending");
    }
  }
  SearchResult result;
  result.max_loss = max_loss;
  std::optional<size_t> best;
  for (size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].accuracy_loss > max_loss + kLossSlack) continue;
    // >= so a later (larger) delta wins ties.
    if (!best || reports[i].skip_percent >= reports[*best].skip_percent) {
      best = i;
    }
  }
  result.feasible = best.has_value();
  result.best_index = best.value_or(reports.size() - 1);
  result.best_delta = reports[result.best_index].delta;
  result.reports = std::move(reports);
  return result;
}

SearchResult ThresholdSearch(const Model& model,
                             std::span<const TaskItem> items,
                             std::span<const double> grid, double max_loss,
                             const OracleParams& base,
                             const Evaluator& evaluator,
                             const FullDepthResults& full, int workers) {
  if (grid.empty()) throw ValidationError("threshold search: empty grid");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) {
      throw ValidationError("threshold search: grid must be strictly "
                            "ascending");
    }
  }
  std::vector<OracleReport> reports;
  reports.reserve(grid.size());
  for (double delta : grid) {
    OracleParams p = base;
    p.delta = delta;
    reports.push_back(
        EvaluateAtThreshold(model, items, p, evaluator, full, workers));
  }
  return SelectThreshold(std::move(reports), max_loss);
}

std::vector<double> MakeGrid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step) ||
      !(step > 0.0) || hi < lo) {
    throw ValidationError("grid: need finite lo <= hi and step > 0");
  }
  const auto n = static_cast<int64_t>(std::floor((hi - lo) / step + 1e-9));
  std::vector<double> grid;
  for (int64_t i = 0; i <= n; ++i) {
    grid.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  }
  return grid;
}

}  // namespace eeprof
