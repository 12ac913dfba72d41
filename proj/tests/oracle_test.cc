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

#include <algorithm>
#include <random>

#include "eeprof/error.h"
#include "eeprof/signals.h"
#include "eeprof/tensor_ops.h"
#include "eeprof/transformer.h"
#include "gtest/gtest.h"
#include "test_support.h"

namespace eeprof {
namespace {

using testing_support::CalibratedItems;
using testing_support::Encode;
using testing_support::Fixture;
using testing_support::LoadFixtureJson;

OracleReport Point(double delta, double acc, double skip, double full = 0.40) {
  OracleReport r;
  r.delta = delta;
  r.full_accuracy = full;
  r.early_exit_accuracy = acc;
  r.accuracy_loss = full - acc;
  r.skip_percent = skip;
  return r;
}

// Exhaustive enumeration over the grid.
std::pair<size_t, bool> BruteForce(const std::vector<OracleReport>& reports,
                                   double max_loss) {
  std::vector<size_t> feasible;
  for (size_t i = 0; i < reports.size(); ++i) {
    if (reports[i].accuracy_loss <= max_loss + 1e-12) feasible.push_back(i);
  }
  if (feasible.empty()) return {reports.size() - 1, false};
  size_t best = feasible[0];
  for (size_t i : feasible) {
    const auto& a = reports[i];
    const auto& b = reports[best];
    if (a.skip_percent > b.skip_percent ||
        (a.skip_percent == b.skip_percent && a.delta > b.delta)) {
      best = i;
    }
  }
  return {best, true};
}

const std::vector<TaskItem>& Items() {
  static const auto items = CalibratedItems(Fixture(), 6, 12);
  return items;
}

const FullDepthResults& Full() {
  static const auto full =
      RunFullDepth(Fixture(), Items(), Evaluator::ForTask(TaskKind::kGsm8k), 12);
  return full;
}

TEST(ExitLayerTest, EarliestMatchOrFullDepth) {
  const std::vector<double> sims = {0.5, 0.7, 0.95, 1.0};
  EXPECT_EQ(ExitLayer(sims, 0.9), 3);
  EXPECT_EQ(ExitLayer(sims, 0.7), 2);
  EXPECT_EQ(ExitLayer(sims, -2.0), 1);
  EXPECT_EQ(ExitLayer(sims, 1.0), 4);
  EXPECT_EQ(ExitLayer(sims, 1.01), 4);
  EXPECT_EQ(ExitLayer(std::vector<double>{0.99, 0.2, 0.3, 1.0}, 0.9), 1);
}

TEST(OracleDecodeTest, UnreachableDeltaEqualsGreedy) {
  for (const std::string text : {"Question: 1+2?", "abc", "Answer: 7\n"}) {
    const auto prompt = Encode(text);
    OracleParams params;
    params.delta = 1.01;
    params.max_tokens = 32;
    const auto tr = OracleDecode(Fixture(), prompt, params);
    GenerationOptions opts;
    opts.max_tokens = 32;
    EXPECT_EQ(tr.tokens, GreedyDecode(Fixture(), prompt, opts).tokens);
    for (int k : tr.exit_layers) EXPECT_EQ(k, 4);
    EXPECT_EQ(tr.mean_skip_ratio, 0.0);
  }
}

TEST(OracleDecodeTest, NegativeDeltaAlwaysExitsAtFirstLayer) {
  const auto prompt = Encode("Question: 5*5?");
  OracleParams params;
  params.delta = -2.0;
  params.max_tokens = 10;
  const auto tr = OracleDecode(Fixture(), prompt, params);
  ASSERT_EQ(tr.tokens.size(), 10u);
  for (int k : tr.exit_layers) EXPECT_EQ(k, 1);
  EXPECT_NEAR(tr.mean_skip_ratio, 0.75, 1e-12);
  std::vector<TokenId> ctx = prompt;
  for (TokenId t : tr.tokens) {
    EXPECT_EQ(t, Argmax(ForwardStep(Fixture(), ctx).Logits(1)));
    ctx.push_back(t);
  }
}

TEST(OracleDecodeTest, MatchesReferenceTranscripts) {
  const auto ref = LoadFixtureJson("reference_forward.json");
  const auto prompt = ref["oracle_prompt"].get<std::vector<TokenId>>();
  for (const auto& golden : ref["oracle_transcripts"]) {
    OracleParams params;
    params.delta = golden["delta"];
    params.max_tokens = 16;
    const auto tr = OracleDecode(Fixture(), prompt, params, "p");
    EXPECT_EQ(tr.tokens, golden["tokens"].get<std::vector<TokenId>>());
    EXPECT_EQ(tr.exit_layers, golden["exit_layers"].get<std::vector<int>>());
    for (size_t i = 0; i < tr.exit_similarity.size(); ++i) {
      EXPECT_NEAR(tr.exit_similarity[i],
                  golden["exit_similarity"][i].get<double>(), 1e-5);
    }
  }
}

TEST(OracleDecodeTest, TranscriptInvariantsAgainstReExecution) {
  const auto prompt = Encode("Question: 12 apples?\nAnswer:");
  OracleParams params;
  params.delta = 0.6;
  params.max_tokens = 20;
  const auto tr = OracleDecode(Fixture(), prompt, params, "p");
  ASSERT_EQ(tr.exit_layers.size(), tr.tokens.size());
  double skip = 0.0;
  int64_t hist = 0;
  for (int k : tr.exit_layers) skip += (4.0 - k) / 4.0;
  for (int64_t h : tr.exit_histogram) hist += h;
  EXPECT_NEAR(tr.mean_skip_ratio, skip / tr.tokens.size(), 1e-12);
  EXPECT_EQ(hist, static_cast<int64_t>(tr.tokens.size()));

  // Step-by-step re-execution without a cache.
  std::vector<TokenId> ctx = prompt;
  for (size_t i = 0; i < tr.tokens.size(); ++i) {
    const StepTrace t = ForwardStep(Fixture(), ctx);
    int k = 4;
    for (int l = 1; l <= 4; ++l) {
      if (Cosine(t.Logits(l), t.Logits(4)) >= 0.6) {
        k = l;
        break;
      }
    }
    EXPECT_EQ(tr.exit_layers[i], k) << i;
    EXPECT_EQ(tr.tokens[i], Argmax(t.Logits(k))) << i;
    ctx.push_back(tr.tokens[i]);
  }
}

TEST(OracleDecodeTest, ExitLayerMonotoneInDelta) {
  GenerationOptions opts;
  opts.max_tokens = 25;
  opts.capture = CaptureLevel::kFull;
  const auto grid = MakeGrid(0.5, 1.0, 0.01);
  for (const std::string text : {"Q: 3+4=", "Once upon a time", "12 * 12 ="}) {
    const auto r = GreedyDecode(Fixture(), Encode(text), opts);
    for (const StepTrace& t : r.traces) {
      const auto sims = LayerSimilarities(t, Signal::OutputLogits());
      int prev = 0;
      for (double d : grid) {
        const int k = ExitLayer(sims, d);
        EXPECT_GE(k, prev);
        prev = k;
      }
    }
  }
}

TEST(SelectThresholdTest, SyntheticThreePointGrid) {
  const std::vector<OracleReport> reports = {
      Point(0.7, 0.30, 8), Point(0.8, 0.37, 5), Point(0.9, 0.40, 1)};
  const auto r = SelectThreshold(reports, 0.05);
  EXPECT_TRUE(r.feasible);
  EXPECT_EQ(r.best_delta, 0.8);
  EXPECT_EQ(r.best_index, 1u);
  EXPECT_EQ(BruteForce(reports, 0.05), std::make_pair(size_t{1}, true));
}

TEST(SelectThresholdTest, AllFeasibleAndInfeasible) {
  const std::vector<OracleReport> ok = {
      Point(0.7, 0.39, 8), Point(0.8, 0.40, 5), Point(0.9, 0.40, 1)};
  EXPECT_EQ(SelectThreshold(ok, 0.05).best_delta, 0.7);
  const std::vector<OracleReport> bad = {
      Point(0.7, 0.10, 8), Point(0.8, 0.20, 5), Point(0.9, 0.30, 1)};
  const auto r = SelectThreshold(bad, 0.05);
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(r.best_delta, 0.9);
  const std::vector<OracleReport> tie = {
      Point(0.7, 0.40, 3), Point(0.8, 0.40, 3), Point(0.9, 0.40, 1)};
  EXPECT_EQ(SelectThreshold(tie, 0.0).best_delta, 0.8);
  EXPECT_THROW(SelectThreshold({}, 0.05), ValidationError);
  EXPECT_THROW(SelectThreshold({Point(0.9, .4, 1), Point(0.8, .4, 1)}, 0.05),
               ValidationError);
}

TEST(SelectThresholdTest, AgreesWithBruteForceOnRandomGrids) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> correct(0, 10);
  std::uniform_int_distribution<int> skip(0, 20);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<OracleReport> reports;
    const int n = 1 + trial % 12;
    for (int i = 0; i < n; ++i) {
      reports.push_back(
          Point(0.5 + 0.01 * i, correct(rng) / 10.0, skip(rng) * 2.5, 0.8));
    }
    const double budget = (trial % 5) * 0.05;
    const auto r = SelectThreshold(reports, budget);
    const auto [index, feasible] = BruteForce(reports, budget);
    EXPECT_EQ(r.best_index, index);
    EXPECT_EQ(r.feasible, feasible);
  }
}

TEST(EvaluateAtThresholdTest, UnreachableDeltaMatchesFullDepth) {
  OracleParams params;
  params.delta = 1.01;
  params.max_tokens = 12;
  const auto r = EvaluateAtThreshold(Fixture(), Items(), params,
                                     Evaluator::ForTask(TaskKind::kGsm8k), Full());
  EXPECT_EQ(r.early_exit_accuracy, r.full_accuracy);
  EXPECT_EQ(r.accuracy_loss, 0.0);
  EXPECT_EQ(r.skip_percent, 0.0);
  EXPECT_GT(r.full_accuracy, 0.0);
  for (size_t i = 0; i < r.transcripts.size(); ++i) {
    EXPECT_EQ(r.transcripts[i].tokens, Full().generations[i]);
  }
}

TEST(EvaluateAtThresholdTest, ComposesPerPromptTranscripts) {
  const std::vector<TaskItem> two(Items().begin(), Items().begin() + 2);
  const auto eval = Evaluator::ForTask(TaskKind::kGsm8k);
  const auto full = RunFullDepth(Fixture(), two, eval, 12);
  OracleParams params;
  params.delta = 0.6;
  params.max_tokens = 12;
  const auto r = EvaluateAtThreshold(Fixture(), two, params, eval, full);

  int64_t tokens = 0, skipped = 0, correct = 0;
  std::vector<int64_t> hist(4, 0);
  for (size_t i = 0; i < two.size(); ++i) {
    const auto tr = OracleDecode(Fixture(), Encode(RenderPrompt(two[i].task, two[i])),
                                 params, two[i].id);
    EXPECT_EQ(r.transcripts[i].tokens, tr.tokens);
    tokens += tr.tokens.size();
    for (int k : tr.exit_layers) {
      skipped += 4 - k;
      ++hist[k - 1];
    }
    const std::string pred = ByteTokenizer(Fixture()).Decode(tr.tokens);
    correct += ScoreGsm8k(std::vector<std::string>{pred},
                          std::vector<std::string>{two[i].reference})
                   .correct;
  }
  EXPECT_EQ(r.generated_tokens, tokens);
  EXPECT_EQ(r.exit_histogram, hist);
  EXPECT_NEAR(r.skip_percent, 100.0 * skipped / (4.0 * tokens), 1e-12);
  EXPECT_EQ(r.early_exit_correct, correct);
  EXPECT_EQ(r.full_correct, full.eval.correct);
  EXPECT_NEAR(r.accuracy_loss, r.full_accuracy - r.early_exit_accuracy, 1e-15);
  EXPECT_EQ(r.prompt_ids, (std::vector<std::string>{two[0].id, two[1].id}));
}

TEST(EvaluateAtThresholdTest, RejectsMismatchedEvaluatorOrResults) {
  OracleParams params;
  params.max_tokens = 4;
  EXPECT_THROW(EvaluateAtThreshold(Fixture(), Items(), params,
                                   Evaluator::ForTask(TaskKind::kMmlu), Full()),
               ValidationError);
  const std::vector<TaskItem> one(Items().begin(), Items().begin() + 1);
  EXPECT_THROW(EvaluateAtThreshold(Fixture(), one, params,
                                   Evaluator::ForTask(TaskKind::kGsm8k), Full()),
               ValidationError);
  EXPECT_THROW(EvaluateAtThreshold(Fixture(), {}, params,
                                   Evaluator::ForTask(TaskKind::kGsm8k), Full()),
               ValidationError);
}

TEST(ThresholdSearchTest, FixtureRunEqualsBruteForce) {
  const auto grid = MakeGrid(0.5, 1.0, 0.05);
  OracleParams base;
  base.max_tokens = 12;
  const auto eval = Evaluator::ForTask(TaskKind::kGsm8k);
  const auto result = ThresholdSearch(Fixture(), Items(), grid, 0.05, base, eval, Full(), 3);
  ASSERT_EQ(result.reports.size(), grid.size());
  std::vector<OracleReport> independent;
  for (double d : grid) {
    OracleParams p = base;
    p.delta = d;
    independent.push_back(EvaluateAtThreshold(Fixture(), Items(), p, eval, Full()));
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(result.reports[i].delta, grid[i]);
    EXPECT_EQ(result.reports[i].skip_percent, independent[i].skip_percent);
    EXPECT_EQ(result.reports[i].accuracy_loss, independent[i].accuracy_loss);
  }
  const auto [index, feasible] = BruteForce(independent, 0.05);
  EXPECT_EQ(result.best_index, index);
  EXPECT_EQ(result.feasible, feasible);
  EXPECT_EQ(result.best_delta, grid[index]);
}

TEST(MakeGridTest, InclusiveAndAscending) {
  const auto g = MakeGrid(0.5, 1.0, 0.01);
  ASSERT_EQ(g.size(), 51u);
  EXPECT_EQ(g.front(), 0.5);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(g[20], 0.7);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_THROW(MakeGrid(1.0, 0.5, 0.01), ValidationError);
  EXPECT_THROW(MakeGrid(0.5, 1.0, 0.0), ValidationError);
}

TEST(OracleParamsTest, Validation) {
  OracleParams p;
  p.max_tokens = 0;
  EXPECT_THROW(p.Validate(), ValidationError);
  p.max_tokens = 1;
  p.delta = std::numeric_limits<double>::infinity();
  EXPECT_THROW(p.Validate(), ValidationError);
  p.delta = 5.0;
  EXPECT_NO_THROW(p.Validate());
}

}  // namespace
}  // namespace eeprof
