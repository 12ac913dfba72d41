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

#ifndef EEPROF_EVALUATORS_H_
#define EEPROF_EVALUATORS_H_

// Zero-shot prompt templates and answer scoring for GSM8K-style numeric
// tasks and MMLU/GPQA-style multiple choice.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace eeprof {

enum class TaskKind { kGsm8k, kMmlu, kGpqa, kHumanEval };

std::string ToString(TaskKind kind);
TaskKind ParseTaskKind(const std::string& s);
bool IsMultipleChoice(TaskKind kind);

struct TaskItem {
  std::string id;
  TaskKind task = TaskKind::kGsm8k;
  // Template placeholders, e.g. "question", "input", "A".."D", "prompt".
  std::map<std::string, std::string> fields;
  std::string reference;
};

// Placeholder names the template for `kind` requires, in template order.
std::vector<std::string> TemplateFields(TaskKind kind);

// Byte-exact template instantiation. Throws ValidationError naming the
// first missing field.
std::string RenderPrompt(TaskKind kind, const TaskItem& item);

// Text before the first "Question:", then the last match of
// -?\d+\.\d+|-?\d+ (no separators or exponents).
std::optional<std::string> ExtractGsm8k(std::string_view prediction);

// First option letter not flanked by an ASCII letter or digit.
std::optional<char> FirstOption(std::string_view prediction,
                                std::string_view options = "ABCD");

struct EvalDetail {
  std::string prompt;
  std::string prediction;
  std::optional<std::string> extracted;
  std::string reference;
  bool is_correct = false;
};

struct EvalReport {
  double accuracy = 0.0;  // percent, 100 * correct / total
  int64_t correct = 0;
  std::vector<EvalDetail> details;
};

// Correct iff the extracted string equals the reference or
// |float(extracted) - int(reference)| < epsilon. References must be
// integers. `prompts` may be empty.
EvalReport ScoreGsm8k(std::span<const std::string> predictions,
                      std::span<const std::string> references,
                      double epsilon = 1e-6,
                      std::span<const std::string> prompts = {});

// Correct iff FirstOption(prediction) equals the reference letter.
EvalReport ScoreMultipleChoice(std::span<const std::string> predictions,
                               std::span<const std::string> references,
                               std::span<const std::string> prompts = {});

enum class EvaluatorKind { kGsm8kNumeric, kFirstOption };

struct Evaluator {
  EvaluatorKind kind = EvaluatorKind::kGsm8kNumeric;
  double epsilon = 1e-6;

  // Throws ValidationError for tasks without a scorer (HumanEval).
  static Evaluator ForTask(TaskKind task, double epsilon = 1e-6);
  bool Supports(TaskKind task) const;
  EvalReport Score(std::span<const std::string> predictions,
                   std::span<const std::string> references,
                   std::span<const std::string> prompts = {}) const;
};

std::string ToString(EvaluatorKind kind);

}  // namespace eeprof

#endif  // EEPROF_EVALUATORS_H_
