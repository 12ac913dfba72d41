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

#ifndef EEPROF_SIGNALS_H_
#define EEPROF_SIGNALS_H_

// Layer-to-final similarity signals and their per-layer aggregation.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eeprof/step_trace.h"

namespace eeprof {

struct Signal {
  enum class Kind { kHiddenState, kOutputLogits, kTopK };

  Kind kind = Kind::kOutputLogits;
  int k = 10;  // only meaningful for kTopK

  static Signal HiddenState() { return {Kind::kHiddenState, 10}; }
  static Signal OutputLogits() { return {Kind::kOutputLogits, 10}; }
  static Signal TopK(int k = 10) { return {Kind::kTopK, k}; }

  // "hidden", "logits" or "topk".
  std::string Name() const;
  bool operator==(const Signal& o) const {
    return kind == o.kind && (kind != Kind::kTopK || k == o.k);
  }
};

Signal ParseSignal(const std::string& name, int k = 10);

struct SignalOptions {
  // Compare softmax probabilities instead of raw logits for kOutputLogits.
  bool logits_as_probabilities = false;
};

// Cosine similarity clamped to [-1, 1]. Throws UndefinedSimilarityError if
// either vector has zero norm and ValidationError on length mismatch.
double Cosine(std::span<const float> u, std::span<const float> v);

// |a ∩ b| / k over the first k ids of each list.
double TopKOverlap(std::span<const TokenId> a, std::span<const TokenId> b,
                   int k);

// Similarity of layer `layer` (1..L) to layer L under `signal`.
double StepSimilarity(const StepTrace& trace, int layer, const Signal& signal,
                      const SignalOptions& options = {});

// StepSimilarity for every layer 1..L (the last entry compares L to itself).
std::vector<double> LayerSimilarities(const StepTrace& trace,
                                      const Signal& signal,
                                      const SignalOptions& options = {});

struct LayerStats {
  double mean = 0.0;
  double std = 0.0;  // population
  int64_t count = 0;
};

struct SignalProfile {
  Signal signal;
  std::vector<LayerStats> layers;  // index i holds layer i + 1, for 1..L-1
};

struct SimilarityProfile {
  std::string model_id;
  std::string dataset_id;
  int num_layers = 0;
  std::vector<SignalProfile> signals;

  // Throws CapabilityError if `signal` was not aggregated.
  const SignalProfile& For(const Signal& signal) const;
  bool Has(const Signal& signal) const;
};

// Streaming aggregation over generated-token steps pooled across prompts.
// Reduction is order-independent: per-layer samples are sorted before a
// compensated sum, so any insertion order yields bit-identical statistics.
class ProfileBuilder {
 public:
  ProfileBuilder(std::vector<Signal> signals, SignalOptions options = {});

  void Add(const StepTrace& trace);
  // Raw per-step samples; index [signal][layer - 1].
  void AddSamples(const std::vector<std::vector<double>>& samples);
  std::vector<std::vector<double>> Samples(const StepTrace& trace) const;

  int64_t steps() const { return steps_; }
  // Throws ValidationError if no steps were added.
  SimilarityProfile Build(std::string model_id, std::string dataset_id) const;

 private:
  std::vector<Signal> signals_;
  SignalOptions options_;
  int num_layers_ = 0;
  int64_t steps_ = 0;
  // [signal][layer - 1] -> samples
  std::vector<std::vector<std::vector<double>>> samples_;
};

SimilarityProfile Aggregate(std::span<const StepTrace> traces,
                            const std::vector<Signal>& signals,
                            const SignalOptions& options = {},
                            std::string model_id = "",
                            std::string dataset_id = "");

// Signals a trace can support given what it captured.
std::vector<Signal> AvailableSignals(const StepTrace& trace, int k = 10);

}  // namespace eeprof

#endif  // EEPROF_SIGNALS_H_
