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

#include "eeprof/signals.h"

#include <algorithm>
#include <cmath>

#include "eeprof/error.h"
#include "eeprof/tensor_ops.h"

namespace eeprof {
namespace {

// Neumaier-compensated sum.
double StableSum(std::span<const double> xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

std::vector<float> Softmax(std::span<const float> logits) {
  double mx = logits[0];
  for (float v : logits) mx = std::max(mx, static_cast<double>(v));
  std::vector<double> e(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    e[i] = std::exp(static_cast<double>(logits[i]) - mx);
    sum += e[i];
  }
  std::vector<float> p(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = static_cast<float>(e[i] / sum);
  }
  return p;
}

std::vector<TokenId> TopIds(const StepTrace& t, int layer, int k) {
  if (k < 1 || k > t.vocab_size) {
    throw ValidationError("top-K signal: K=" + std::to_string(k) +
                          " outside [1, vocab_size]");
  }
  if (t.has_topk() && t.topk_k() >= k) {
    const auto& ids = t.TopK(layer).ids;
    return std::vector<TokenId>(ids.begin(), ids.begin() + k);
  }
  if (t.has_logits()) return TopKIndices(t.Logits(layer), k);
  throw CapabilityError("trace has neither logits nor a top-" +
                        std::to_string(k) + " digest");
}

}  // namespace

std::string Signal::Name() const {
  switch (kind) {
    case Kind::kHiddenState:
      return "hidden";
    case Kind::kOutputLogits:
      return "logits";
    case Kind::kTopK:
      return "topk";
  }
  return "logits";
}

Signal ParseSignal(const std::string& name, int k) {
  if (name == "hidden") return Signal::HiddenState();
  if (name == "logits") return Signal::OutputLogits();
  if (name == "topk") {
    if (k < 1) throw ValidationError("top-K signal needs K >= 1");
    return Signal::TopK(k);
  }
  throw ValidationError("unknown signal '" + name +
                        "' (expected hidden, logits or topk)");
}

double Cosine(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: length mismatch (" +
                          std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    dot += a * b;
    nu += a * a;
    nv += b * b;
  }
  if (!std::isfinite(dot) || !std::isfinite(nu) || !std::isfinite(nv)) {
    throw ValidationError("cosine: non-finite input");
  }
  if (nu == 0.0 || nv == 0.0) {
    throw UndefinedSimilarityError("cosine: zero-norm vector");
  }
  return std::clamp(dot / (std::sqrt(nu) * std::sqrt(nv)), -1.0, 1.0);
}

double TopKOverlap(std::span<const TokenId> a, std::span<const TokenId> b,
                   int k) {
  if (k < 1 || a.size() < static_cast<size_t>(k) ||
      b.size() < static_cast<size_t>(k)) {
    throw ValidationError("top-K overlap: need at least K ids per side");
  }
  std::vector<TokenId> sa(a.begin(), a.begin() + k);
  std::vector<TokenId> sb(b.begin(), b.begin() + k);
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  std::vector<TokenId> common;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                        std::back_inserter(common));
  return static_cast<double>(common.size()) / k;
}

double StepSimilarity(const StepTrace& trace, int layer, const Signal& signal,
                      const SignalOptions& options) {
  const int L = trace.num_layers;
  if (layer < 1 || layer > L) {
    throw ValidationError("step_similarity: layer " + std::to_string(layer) +
                          " outside [1, " + std::to_string(L) + "]");
  }
  switch (signal.kind) {
    case Signal::Kind::kHiddenState:
      return Cosine(trace.Hidden(layer), trace.Hidden(L));
    case Signal::Kind::kOutputLogits:
      if (options.logits_as_probabilities) {
        return Cosine(Softmax(trace.Logits(layer)), Softmax(trace.Logits(L)));
      }
      return Cosine(trace.Logits(layer), trace.Logits(L));
    case Signal::Kind::kTopK:
      return TopKOverlap(TopIds(trace, layer, signal.k),
                         TopIds(trace, L, signal.k), signal.k);
  }
  throw ValidationError("unknown signal kind");
}

std::vector<double> LayerSimilarities(const StepTrace& trace,
                                      const Signal& signal,
                                      const SignalOptions& options) {
  std::vector<double> out;
  out.reserve(trace.num_layers);
  for (int layer = 1; layer <= trace.num_layers; ++layer) {
    out.push_back(StepSimilarity(trace, layer, signal, options));
  }
  return out;
}

const SignalProfile& SimilarityProfile::For(const Signal& signal) const {
  for (const auto& s : signals) {
    if (s.signal == signal) return s;
  }
  throw CapabilityError("profile has no '" + signal.Name() + "' signal");
}

bool SimilarityProfile::Has(const Signal& signal) const {
  return std::any_of(signals.begin(), signals.end(),
                     [&](const SignalProfile& s) { return s.signal == signal; });
}

ProfileBuilder::ProfileBuilder(std::vector<Signal> signals,
                               SignalOptions options)
    : signals_(std::move(signals)), options_(options) {
  if (signals_.empty()) throw ValidationError("profile: no signals requested");
  samples_.resize(signals_.size());
}

std::vector<std::vector<double>> ProfileBuilder::Samples(
    const StepTrace& trace) const {
  std::vector<std::vector<double>> out(signals_.size());
  for (size_t s = 0; s < signals_.size(); ++s) {
    for (int layer = 1; layer < trace.num_layers; ++layer) {
      try {
        out[s].push_back(StepSimilarity(trace, layer, signals_[s], options_));
      } catch (const UndefinedSimilarityError& e) {
        throw UndefinedSimilarityError(std::string(e.what()) + " (step " +
                                       std::to_string(trace.step) +
                                       ", layer " + std::to_string(layer) +
                                       ", signal " + signals_[s].Name() + ")");
      }
    }
  }
  return out;
}

void ProfileBuilder::AddSamples(
    const std::vector<std::vector<double>>& samples) {
  if (samples.size() != signals_.size()) {
    throw ValidationError("profile: sample/signal count mismatch");
  }
  const int L = static_cast<int>(samples.front().size()) + 1;
  if (num_layers_ == 0) {
    num_layers_ = L;
    for (auto& per_signal : samples_) per_signal.resize(L - 1);
  } else if (L != num_layers_) {
    throw ValidationError("profile: traces disagree on layer count (" +
                          std::to_string(L) + " vs " +
                          std::to_string(num_layers_) + ")");
  }
  for (size_t s = 0; s < samples.size(); ++s) {
    for (int i = 0; i < L - 1; ++i) samples_[s][i].push_back(samples[s][i]);
  }
  ++steps_;
}

void ProfileBuilder::Add(const StepTrace& trace) {
  if (trace.num_layers < 2) {
    throw ValidationError("profile: need at least 2 layers");
  }
  AddSamples(Samples(trace));
}

SimilarityProfile ProfileBuilder::Build(std::string model_id,
                                        std::string dataset_id) const {
  if (steps_ == 0) throw ValidationError("profile: no steps to aggregate");
  SimilarityProfile profile;
  profile.model_id = std::move(model_id);
  profile.dataset_id = std::move(dataset_id);
  profile.num_layers = num_layers_;
  for (size_t s = 0; s < signals_.size(); ++s) {
    SignalProfile sp{signals_[s], {}};
    for (const auto& raw : samples_[s]) {
      std::vector<double> xs = raw;
      std::sort(xs.begin(), xs.end());
      const double n = static_cast<double>(xs.size());
      const double mean = StableSum(xs) / n;
      std::vector<double> sq(xs.size());
      for (size_t i = 0; i < xs.size(); ++i) {
        sq[i] = (xs[i] - mean) * (xs[i] - mean);
      }
      sp.layers.push_back(LayerStats{mean, std::sqrt(StableSum(sq) / n),
                                     static_cast<int64_t>(xs.size())});
    }
    profile.signals.push_back(std::move(sp));
  }
  return profile;
}

SimilarityProfile Aggregate(std::span<const StepTrace> traces,
                            const std::vector<Signal>& signals,
                            const SignalOptions& options, std::string model_id,
                            std::string dataset_id) {
  if (traces.empty()) throw ValidationError("aggregate: empty trace set");
  ProfileBuilder builder(signals, options);
  for (const StepTrace& t : traces) builder.Add(t);
  return builder.Build(std::move(model_id), std::move(dataset_id));
}

std::vector<Signal> AvailableSignals(const StepTrace& trace, int k) {
  std::vector<Signal> out;
  if (trace.has_hidden()) out.push_back(Signal::HiddenState());
  if (trace.has_logits()) out.push_back(Signal::OutputLogits());
  if (trace.has_logits() || (trace.has_topk() && trace.topk_k() >= k)) {
    out.push_back(Signal::TopK(k));
  }
  return out;
}

}  // namespace eeprof
