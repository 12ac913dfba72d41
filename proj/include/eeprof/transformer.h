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

#ifndef EEPROF_TRANSFORMER_H_
#define EEPROF_TRANSFORMER_H_

// Pre-norm decoder-only transformer: RMSNorm, rotary multi-head causal
// attention and a GELU MLP, with last-position taps after every block.

#include <span>
#include <vector>

#include "eeprof/model.h"
#include "eeprof/step_trace.h"

namespace eeprof {

struct LensOptions {
  // Apply the final RMSNorm before the LM head for intermediate layers.
  // The final layer always uses it since its logits drive decoding.
  bool apply_final_norm = true;
};

// Per-layer keys and values (post-rotary) for the tokens consumed so far.
// One cache belongs to one decoding session.
class KvCache {
 public:
  explicit KvCache(const ModelConfig& config);

  size_t size() const { return tokens_.size(); }
  std::span<const TokenId> tokens() const { return tokens_; }
  void Clear() { Truncate(0); }
  void Truncate(size_t n);

  // Used by the forward pass.
  std::vector<float>& keys(int block) { return keys_[block]; }
  std::vector<float>& values(int block) { return values_[block]; }
  void PushToken(TokenId t) { tokens_.push_back(t); }

 private:
  int d_model_;
  std::vector<std::vector<float>> keys_;
  std::vector<std::vector<float>> values_;
  std::vector<TokenId> tokens_;
};

// Logit-lens projection: LM head applied to (optionally final-normed) hidden.
std::vector<float> ProjectLogits(const Model& model,
                                 std::span<const float> hidden,
                                 bool apply_final_norm = true);

// Runs the model over `context` and returns hidden[1..L] and logits[1..L] at
// the last position. With a cache, only positions past the cached prefix are
// computed (a cache that is not a prefix of `context` is reset). The
// returned trace has step 0 and no chosen token.
StepTrace ForwardStep(const Model& model, std::span<const TokenId> context,
                      KvCache* cache = nullptr, const LensOptions& lens = {});

// A growing context plus its cache.
class DecodeSession {
 public:
  DecodeSession(const Model& model, std::span<const TokenId> prompt,
                LensOptions lens = {});

  // Full trace for the current context; step index counts calls.
  StepTrace Step();
  void Append(TokenId token) { context_.push_back(token); }
  bool AtCapacity() const {
    return static_cast<int>(context_.size()) >= model_.config().max_seq_len;
  }
  const std::vector<TokenId>& context() const { return context_; }

 private:
  const Model& model_;
  LensOptions lens_;
  KvCache cache_;
  std::vector<TokenId> context_;
  int steps_ = 0;
};

struct GenerationOptions {
  int max_tokens = 1024;
  CaptureLevel capture = CaptureLevel::kNone;
  int topk = 10;
  LensOptions lens;
};

struct GenerationResult {
  std::vector<TokenId> tokens;
  std::vector<StepTrace> traces;  // one per token unless capture is kNone
  bool stopped_on_eos = false;
  bool truncated = false;  // hit max_seq_len before max_tokens / EOS
};

// Temperature-zero decoding: every token is the argmax of the final layer's
// logits (ties to the lowest id). EOS is emitted and ends generation.
GenerationResult GreedyDecode(const Model& model,
                              std::span<const TokenId> prompt,
                              const GenerationOptions& options);

}  // namespace eeprof

#endif  // EEPROF_TRANSFORMER_H_
