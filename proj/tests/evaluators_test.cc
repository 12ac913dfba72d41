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

#include <algorithm>
#include <random>

#include "eeprof/error.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace eeprof {
namespace {

using testing_support::LoadFixtureJson;

TaskItem Item(TaskKind task, std::map<std::string, std::string> fields) {
  return TaskItem{"t1", task, std::move(fields), ""};
}

std::optional<std::string> Opt(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

TEST(RenderPromptTest, Gsm8kTemplate) {
  EXPECT_EQ(RenderPrompt(TaskKind::kGsm8k, Item(TaskKind::kGsm8k, {{"question", "2+2?"}})),
            "Question: 2+2?\nLet's think step by step\nAnswer:");
}

TEST(RenderPromptTest, MultipleChoiceTemplates) {
  const std::map<std::string, std::string> opts = {
      {"A", "Paris"}, {"B", "Rome"}, {"C", "Oslo"}, {"D", "Bern"}};
  auto mmlu = opts;
  mmlu["input"] = "Capital of France?";
  EXPECT_EQ(RenderPrompt(TaskKind::kMmlu, Item(TaskKind::kMmlu, mmlu)),
            "Question: Capital of France?\nA. Paris\nB. Rome\nC. Oslo\n"
            "D. Bern\nAnswer:");
  auto gpqa = opts;
  gpqa["question"] = "Which?";
  EXPECT_EQ(RenderPrompt(TaskKind::kGpqa, Item(TaskKind::kGpqa, gpqa)),
            "Question: Which?\nA. Paris\nB. Rome\nC. Oslo\nD. Bern\nAnswer:");
}

TEST(RenderPromptTest, HumanEvalTemplate) {
  EXPECT_EQ(RenderPrompt(TaskKind::kHumanEval,
                         Item(TaskKind::kHumanEval, {{"prompt", "def f(x):\n"}})),
            "Read the following function signature and docstring, and fully "
            "implement the function described.\nYour response should only "
            "contain the code for this function.\ndef f(x):\n");
}

TEST(RenderPromptTest, MissingFieldIsNamed) {
  const auto item = Item(TaskKind::kMmlu,
                         {{"input", "q"}, {"A", "a"}, {"B", "b"}, {"C", "c"}});
  try {
    RenderPrompt(TaskKind::kMmlu, item);
    FAIL() << "expected an error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'D'"), std::string::npos) << e.what();
  }
}

TEST(ExtractGsm8kTest, Examples) {
  EXPECT_EQ(ExtractGsm8k("The answer is 72."), "72");
  EXPECT_EQ(ExtractGsm8k("3.5 miles each way, so 7 total"), "7");
  EXPECT_EQ(ExtractGsm8k("42\nQuestion: and next? 99"), "42");
  EXPECT_EQ(ExtractGsm8k("no digits"), std::nullopt);
  EXPECT_EQ(ExtractGsm8k("Question: 5"), std::nullopt);
}

TEST(ExtractGsm8kTest, IdempotentOnItsOutput) {
  std::mt19937 rng(8);
  const std::string alphabet = "0123456789 .-abcQ:\n";
  for (int i = 0; i < 2000; ++i) {
    std::string s(rng() % 24, ' ');
    for (char& c : s) c = alphabet[rng() % alphabet.size()];
    const auto once = ExtractGsm8k(s);
    if (once) EXPECT_EQ(ExtractGsm8k(*once), once) << s;
  }
}

TEST(FirstOptionTest, Examples) {
  EXPECT_EQ(FirstOption("B. Paris is correct"), 'B');
  EXPECT_EQ(FirstOption("I choose (C) because"), 'C');
  EXPECT_EQ(FirstOption("Answer: D"), 'D');
  EXPECT_EQ(FirstOption("none of these"), std::nullopt);
  EXPECT_EQ(FirstOption("ABSENT"), std::nullopt);
}

TEST(FirstOptionTest, ResultAlwaysAppearsInText) {
  std::mt19937 rng(4);
  const std::string alphabet = "ABCDEabcde ().:1\n";
  for (int i = 0; i < 5000; ++i) {
    std::string s(rng() % 16, ' ');
    for (char& c : s) c = alphabet[rng() % alphabet.size()];
    const auto opt = FirstOption(s);
    if (opt) {
      EXPECT_NE(s.find(*opt), std::string::npos);
      EXPECT_NE(std::string("ABCD").find(*opt), std::string::npos);
    }
  }
}

TEST(ScoreTest, Gsm8kExamples) {
  const std::vector<std::string> preds = {"so it is 42.0", "nothing", "is 5"};
  const std::vector<std::string> refs = {"42", "7", "5"};
  const auto r = ScoreGsm8k(preds, refs);
  EXPECT_EQ(r.correct, 2);
  EXPECT_NEAR(r.accuracy, 200.0 / 3.0, 1e-12);
  EXPECT_TRUE(r.details[0].is_correct);
  EXPECT_FALSE(r.details[1].is_correct);
  EXPECT_EQ(r.details[1].extracted, std::nullopt);
}

TEST(ScoreTest, Gsm8kErrors) {
  const std::vector<std::string> one = {"1"}, two = {"1", "2"};
  EXPECT_THROW(ScoreGsm8k(one, two), ValidationError);
  EXPECT_THROW(ScoreGsm8k(one, std::vector<std::string>{"1.5"}), ValidationError);
  EXPECT_THROW(ScoreGsm8k(one, std::vector<std::string>{"seven"}), ValidationError);
}

TEST(ScoreTest, MultipleChoiceExamples) {
  const std::vector<std::string> refs = {"A", "B", "C", "D"};
  EXPECT_EQ(ScoreMultipleChoice(std::vector<std::string>{"A", "B.", "(C)", "Answer: D"}, refs)
                .accuracy,
            100.0);
  const auto r = ScoreMultipleChoice(
      std::vector<std::string>{"A", "none", "D", "ABSENT"}, refs);
  EXPECT_EQ(r.accuracy, 25.0);
  EXPECT_EQ(r.details[1].extracted, std::nullopt);
  EXPECT_FALSE(r.details[1].is_correct);
}

TEST(ScoreTest, OrderEquivariantAndConsistent) {
  std::vector<std::string> preds, refs;
  std::mt19937 rng(12);
  for (int i = 0; i < 60; ++i) {
    preds.push_back("total " + std::to_string(rng() % 10));
    refs.push_back(std::to_string(rng() % 10));
  }
  const auto base = ScoreGsm8k(preds, refs);
  int64_t flagged = 0;
  for (const auto& d : base.details) flagged += d.is_correct;
  EXPECT_EQ(flagged, base.correct);
  EXPECT_GE(base.accuracy, 0.0);
  EXPECT_LE(base.accuracy, 100.0);
  std::vector<size_t> perm(preds.size());
  std::iota(perm.begin(), perm.end(), 0);
  for (int t = 0; t < 10; ++t) {
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::string> p2, r2;
    for (size_t i : perm) {
      p2.push_back(preds[i]);
      r2.push_back(refs[i]);
    }
    EXPECT_EQ(ScoreGsm8k(p2, r2).accuracy, base.accuracy);
  }
}

TEST(EvaluatorCorpusTest, LabelsAgreeExactly) {
  const auto corpus = LoadFixtureJson("evaluator_corpus.json");
  ASSERT_EQ(corpus["gsm8k"].size(), 20u);
  ASSERT_EQ(corpus["multiple_choice"].size(), 20u);
  for (const auto& c : corpus["gsm8k"]) {
    const std::string pred = c["prediction"];
    EXPECT_EQ(ExtractGsm8k(pred), Opt(c["extracted"])) << pred;
    const auto r = ScoreGsm8k(std::vector<std::string>{pred},
                              std::vector<std::string>{c["reference"]});
    EXPECT_EQ(r.details[0].is_correct, c["correct"].get<bool>()) << pred;
  }
  for (const auto& c : corpus["multiple_choice"]) {
    const std::string pred = c["prediction"];
    const auto letter = FirstOption(pred);
    EXPECT_EQ(letter ? std::optional<std::string>(std::string(1, *letter))
                     : std::nullopt,
              Opt(c["extracted"]))
        << pred;
    const auto r = ScoreMultipleChoice(std::vector<std::string>{pred},
                                       std::vector<std::string>{c["reference"]});
    EXPECT_EQ(r.details[0].is_correct, c["correct"].get<bool>()) << pred;
  }
}

TEST(EvaluatorTest, TaskDispatch) {
  EXPECT_EQ(Evaluator::ForTask(TaskKind::kGsm8k).kind, EvaluatorKind::kGsm8kNumeric);
  EXPECT_EQ(Evaluator::ForTask(TaskKind::kGpqa).kind, EvaluatorKind::kFirstOption);
  EXPECT_THROW(Evaluator::ForTask(TaskKind::kHumanEval), ValidationError);
  EXPECT_FALSE(Evaluator::ForTask(TaskKind::kMmlu).Supports(TaskKind::kGsm8k));
  EXPECT_EQ(ParseTaskKind("gpqa"), TaskKind::kGpqa);
  EXPECT_THROW(ParseTaskKind("arc"), ValidationError);
}

}  // namespace
}  // namespace eeprof
