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

#include "eeprof/evaluators.h"

#include <charconv>
#include <cmath>
#include <regex>

#include "eeprof/error.h"

namespace eeprof {
namespace {

bool IsAsciiAlnum(char c) {
  return (c >= '0' && c <= '9') || (c >= 'A' && c <= 'Z') ||
         (c >= 'a' && c <= 'z');
}

const std::string& Field(const TaskItem& item, const std::string& name) {
  auto it = item.fields.find(name);
  if (it == item.fields.end()) {
    throw ValidationError("item '" + item.id + "': missing field '" + name +
                          "'");
  }
  return it->second;
}

void CheckLengths(size_t predictions, size_t references, size_t prompts) {
  if (predictions != references) {
    throw ValidationError("scoring: " + std::to_string(predictions) +
                          " predictions vs " + std::to_string(references) +
                          " references");
  }
  if (prompts != 0 && prompts != predictions) {
    throw ValidationError("scoring: prompt count does not match predictions");
  }
}

long double ParseIntegerReference(const std::string& ref) {
  size_t b = 0, e = ref.size();
  while (b < e && std::isspace(static_cast<unsigned char>(ref[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(ref[e - 1]))) --e;
  long long value = 0;
  const char* first = ref.data() + b;
  const char* last = ref.data() + e;
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (first == last || ec != std::errc() || ptr != last) {
    throw ValidationError("GSM8K reference '" + ref + "' is not an integer");
  }
  return static_cast<long double>(value);
}

EvalReport Finish(std::vector<EvalDetail> details) {
  EvalReport r;
  for (const auto& d : details) r.correct += d.is_correct ? 1 : 0;
  r.accuracy = details.empty()
                   ? 0.0
                   : 100.0 * static_cast<double>(r.correct) / details.size();
  r.details = std::move(details);
  return r;
}

}  // namespace

std::string ToString(TaskKind kind) {
  switch (kind) {
    case TaskKind::kGsm8k:
      return "gsm8k";
    case TaskKind::kMmlu:
      return "mmlu";
    case TaskKind::kGpqa:
      return "gpqa";
    case TaskKind::kHumanEval:
      return "humaneval";
  }
  return "gsm8k";
}

TaskKind ParseTaskKind(const std::string& s) {
  if (s == "gsm8k") return TaskKind::kGsm8k;
  if (s == "mmlu") return TaskKind::kMmlu;
  if (s == "gpqa") return TaskKind::kGpqa;
  if (s == "humaneval") return TaskKind::kHumanEval;
  throw ValidationError("unknown task '" + s +
                        "' (expected gsm8k, mmlu, gpqa or humaneval)");
}

bool IsMultipleChoice(TaskKind kind) {
  return kind == TaskKind::kMmlu || kind == TaskKind::kGpqa;
}

std::vector<std::string> TemplateFields(TaskKind kind) {
  switch (kind) {
    case TaskKind::kGsm8k:
      return {"question"};
    case TaskKind::kMmlu:
      return {"input", "A", "B", "C", "D"};
    case TaskKind::kGpqa:
      return {"question", "A", "B", "C", "D"};
    case TaskKind::kHumanEval:
      return {"prompt"};
  }
  return {};
}

std::string RenderPrompt(TaskKind kind, const TaskItem& item) {
  switch (kind) {
    case TaskKind::kGsm8k:
      return "Question: " + Field(item, "question") +
             "\nLet's think step by step\nAnswer:";
    case TaskKind::kMmlu:
    case TaskKind::kGpqa: {
      const char* stem = kind == TaskKind::kMmlu ? "input" : "question";
      std::string out = "Question: " + Field(item, stem) + "\n";
      for (const char* letter : {"A", "B", "C", "D"}) {
        out += std::string(letter) + ". " + Field(item, letter) + "\n";
      }
      return out + "Answer:";
    }
    case TaskKind::kHumanEval:
      return "Read the following function signature and docstring, and fully "
             "implement the function described.\nYour response should only "
             "contain the code for this function.\n" +
             Field(item, "prompt");
  }
  throw ValidationError("unknown task kind");
}

std::optional<std::string> ExtractGsm8k(std::string_view prediction) {
  static const std::regex kNumber(R"(-?\d+\.\d+|-?\d+)");
  const auto cut = prediction.find("Question:");
  const std::string head(prediction.substr(0, cut));
  std::optional<std::string> last;
  for (auto it = std::sregex_iterator(head.begin(), head.end(), kNumber);
       it != std::sregex_iterator(); ++it) {
    last = it->str();
  }
  return last;
}

std::optional<char> FirstOption(std::string_view prediction,
                                std::string_view options) {
  for (size_t i = 0; i < prediction.size(); ++i) {
    const char c = prediction[i];
    if (options.find(c) == std::string_view::npos) continue;
    const bool left_ok = i == 0 || !IsAsciiAlnum(prediction[i - 1]);
    const bool right_ok =
        i + 1 == prediction.size() || !IsAsciiAlnum(prediction[i + 1]);
    if (left_ok && right_ok) return c;
  }
  return std::nullopt;
}

EvalReport ScoreGsm8k(std::span<const std::string> predictions,
                      std::span<const std::string> references, double epsilon,
                      std::span<const std::string> prompts) {
  CheckLengths(predictions.size(), references.size(), prompts.size());
  std::vector<EvalDetail> details;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const long double ref = ParseIntegerReference(references[i]);
    EvalDetail d;
    d.prompt = prompts.empty() ? "" : prompts[i];
    d.prediction = predictions[i];
    d.extracted = ExtractGsm8k(predictions[i]);
    d.reference = references[i];
    if (d.extracted) {
      if (*d.extracted == references[i]) {
        d.is_correct = true;
      } else {
        const long double value = std::strtold(d.extracted->c_str(), nullptr);
        d.is_correct = std::fabs(static_cast<double>(value - ref)) < epsilon;
      }
    }
    details.push_back(std::move(d));
  }
  return Finish(std::move(details));
}

EvalReport ScoreMultipleChoice(std::span<const std::string> predictions,
                               std::span<const std::string> references,
                               std::span<const std::string> prompts) {
  CheckLengths(predictions.size(), references.size(), prompts.size());
  std::vector<EvalDetail> details;
  for (size_t i = 0; i < predictions.size(); ++i) {
    EvalDetail d;
    d.prompt = prompts.empty() ? "" : prompts[i];
    d.prediction = predictions[i];
    if (auto letter = FirstOption(predictions[i])) {
      d.extracted = std::string(1, *letter);
    }
    d.reference = references[i];
    d.is_correct = d.extracted && *d.extracted == references[i];
    details.push_back(std::move(d));
  }
  return Finish(std::move(details));
}

Evaluator Evaluator::ForTask(TaskKind task, double epsilon) {
  switch (task) {
    case TaskKind::kGsm8k:
      return {EvaluatorKind::kGsm8kNumeric, epsilon};
    case TaskKind::kMmlu:
    case TaskKind::kGpqa:
      return {EvaluatorKind::kFirstOption, epsilon};
    case TaskKind::kHumanEval:
      break;
  }
  throw ValidationError("no scorer for task '" + ToString(task) +
                        "' (code execution is not supported)");
}

bool Evaluator::Supports(TaskKind task) const {
  return kind == EvaluatorKind::kGsm8kNumeric ? task == TaskKind::kGsm8k
                                              : IsMultipleChoice(task);
}

EvalReport Evaluator::Score(std::span<const std::string> predictions,
                            std::span<const std::string> references,
                            std::span<const std::string> prompts) const {
  return kind == EvaluatorKind::kGsm8kNumeric
             ? ScoreGsm8k(predictions, references, epsilon, prompts)
             : ScoreMultipleChoice(predictions, references, prompts);
}

std::string ToString(EvaluatorKind kind) {
  return kind == EvaluatorKind::kGsm8kNumeric ? "gsm8k-numeric"
                                              : "first-option";
}

}  // namespace eeprof
