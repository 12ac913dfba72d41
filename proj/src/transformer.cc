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

#include "eeprof/transformer.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "eeprof/error.h"
#include "eeprof/tensor_ops.h"

namespace eeprof {
namespace {

void CheckFinite(std::span<const float> x, int layer, size_t pos) {
  for (float v : x) {
    if (!std::isfinite(v)) {
      throw NumericError("non-finite activation after layer " +
                         std::to_string(layer) + " at position " +
                         std::to_string(pos) + " (corrupt weights?)");
    }
  }
}

void ValidateContext(const ModelConfig& c, std::span<const TokenId> context) {
  if (context.empty()) throw ValidationError("forward: empty context");
  if (static_cast<int>(context.size()) > c.max_seq_len) {
    throw ValidationError("forward: context length " +
                          std::to_string(context.size()) +
                          " exceeds max_seq_len " +
                          std::to_string(c.max_seq_len));
  }
  for (TokenId t : context) {
    if (t < 0 || t >= c.vocab_size) {
      throw ValidationError("forward: token id " + std::to_string(t) +
                            " outside vocabulary");
    }
  }
}

// Scratch space for one position.
struct Workspace {
  explicit Workspace(const ModelConfig& c)
      : x(c.d_model), h(c.d_model), q(c.d_model), k(c.d_model), v(c.d_model),
        attn(c.d_model), proj(c.d_model), ff(c.d_ff),
        scores(c.max_seq_len) {}
  std::vector<float> x, h, q, k, v, attn, proj, ff, scores;
};

// Pushes one token through every block, appending to the cache. When `taps`
// is non-null it receives the residual stream after each block.
void ForwardPosition(const Model& model, TokenId token, KvCache& cache,
                     Workspace& ws, std::vector<float>* taps) {
  const ModelConfig& c = model.config();
  const int d = c.d_model;
  const int hd = c.head_dim();
  const size_t pos = cache.size();
  const float scale = 1.0f / std::sqrt(static_cast<float>(hd));

  const auto emb = model.token_embeddings().Row(token);
  std::copy(emb.begin(), emb.end(), ws.x.begin());

  for (int b = 0; b < c.num_layers; ++b) {
    const Model::Block& blk = model.block(b);

    RmsNorm(ws.x, blk.attn_norm->data, c.norm_eps, ws.h);
    MatVec(ws.h, *blk.wq, ws.q);
    MatVec(ws.h, *blk.wk, ws.k);
    MatVec(ws.h, *blk.wv, ws.v);
    for (int head = 0; head < c.num_heads; ++head) {
      ApplyRope(std::span<float>(ws.q).subspan(head * hd, hd),
                static_cast<int>(pos), c.rope_theta);
      ApplyRope(std::span<float>(ws.k).subspan(head * hd, hd),
                static_cast<int>(pos), c.rope_theta);
    }
    std::vector<float>& keys = cache.keys(b);
    std::vector<float>& vals = cache.values(b);
    keys.insert(keys.end(), ws.k.begin(), ws.k.end());
    vals.insert(vals.end(), ws.v.begin(), ws.v.end());

    const size_t n = pos + 1;
    for (int head = 0; head < c.num_heads; ++head) {
      const float* q = ws.q.data() + head * hd;
      std::span<float> scores(ws.scores.data(), n);
      for (size_t j = 0; j < n; ++j) {
        const float* kj = keys.data() + j * d + head * hd;
        float dot = 0.0f;
        for (int i = 0; i < hd; ++i) dot += q[i] * kj[i];
        scores[j] = dot * scale;
      }
      SoftmaxInPlace(scores);
      float* out = ws.attn.data() + head * hd;
      std::fill(out, out + hd, 0.0f);
      for (size_t j = 0; j < n; ++j) {
        const float* vj = vals.data() + j * d + head * hd;
        const float p = scores[j];
        for (int i = 0; i < hd; ++i) out[i] += p * vj[i];
      }
    }
    MatVec(ws.attn, *blk.wo, ws.proj);
    for (int i = 0; i < d; ++i) ws.x[i] += ws.proj[i];

    RmsNorm(ws.x, blk.mlp_norm->data, c.norm_eps, ws.h);
    MatVec(ws.h, *blk.w1, ws.ff);
    GeluInPlace(ws.ff);
    MatVec(ws.ff, *blk.w2, ws.proj);
    for (int i = 0; i < d; ++i) ws.x[i] += ws.proj[i];

    CheckFinite(ws.x, b + 1, pos);
    if (taps) {
      std::copy(ws.x.begin(), ws.x.end(), taps->begin() + b * d);
    }
  }
  cache.PushToken(token);
}

}  // namespace

KvCache::KvCache(const ModelConfig& config)
    : d_model_(config.d_model),
      keys_(config.num_layers),
      values_(config.num_layers) {}

void KvCache::Truncate(size_t n) {
  if (n >= tokens_.size()) return;
  tokens_.resize(n);
  for (auto& k : keys_) k.resize(n * d_model_);
  for (auto& v : values_) v.resize(n * d_model_);
}

std::vector<float> ProjectLogits(const Model& model,
                                 std::span<const float> hidden,
                                 bool apply_final_norm) {
  const ModelConfig& c = model.config();
  if (static_cast<int>(hidden.size()) != c.d_model) {
    throw ValidationError("project_logits: hidden has length " +
                          std::to_string(hidden.size()) + ", expected " +
                          std::to_string(c.d_model));
  }
  for (float v : hidden) {
    if (!std::isfinite(v)) {
      throw NumericError("project_logits: non-finite hidden state");
    }
  }
  std::vector<float> logits(c.vocab_size);
  if (apply_final_norm) {
    std::vector<float> normed(c.d_model);
    RmsNorm(hidden, model.final_norm().data, c.norm_eps, normed);
    MatVec(normed, model.lm_head(), logits);
  } else {
    MatVec(hidden, model.lm_head(), logits);
  }
  return logits;
}

StepTrace ForwardStep(const Model& model, std::span<const TokenId> context,
                      KvCache* cache, const LensOptions& lens) {
  const ModelConfig& c = model.config();
  ValidateContext(c, context);

  KvCache local(c);
  KvCache& kv = cache ? *cache : local;
  const auto cached = kv.tokens();
  if (cached.size() > context.size() ||
      !std::equal(cached.begin(), cached.end(), context.begin())) {
    kv.Clear();
  }
  // The last position must be recomputed to obtain its taps.
  if (kv.size() == context.size()) kv.Truncate(context.size() - 1);

  Workspace ws(c);
  StepTrace trace;
  trace.num_layers = c.num_layers;
  trace.d_model = c.d_model;
  trace.vocab_size = c.vocab_size;
  trace.hidden.resize(static_cast<size_t>(c.num_layers) * c.d_model);

  for (size_t p = kv.size(); p < context.size(); ++p) {
    const bool last = p + 1 == context.size();
    ForwardPosition(model, context[p], kv, ws, last ? &trace.hidden : nullptr);
  }

  trace.logits.resize(static_cast<size_t>(c.num_layers) * c.vocab_size);
  for (int layer = 1; layer <= c.num_layers; ++layer) {
    const bool norm = lens.apply_final_norm || layer == c.num_layers;
    const auto logits = ProjectLogits(model, trace.Hidden(layer), norm);
    std::copy(logits.begin(), logits.end(),
              trace.logits.begin() + static_cast<size_t>(layer - 1) * c.vocab_size);
  }
  return trace;
}

DecodeSession::DecodeSession(const Model& model,
                             std::span<const TokenId> prompt, LensOptions lens)
    : model_(model),
      lens_(lens),
      cache_(model.config()),
      context_(prompt.begin(), prompt.end()) {
  ValidateContext(model.config(), context_);
}

StepTrace DecodeSession::Step() {
  StepTrace t = ForwardStep(model_, context_, &cache_, lens_);
  t.step = steps_++;
  return t;
}

GenerationResult GreedyDecode(const Model& model,
                              std::span<const TokenId> prompt,
                              const GenerationOptions& options) {
  if (options.max_tokens < 1) {
    throw ValidationError("greedy_decode: max_tokens must be >= 1");
  }
  const int L = model.config().num_layers;
  DecodeSession session(model, prompt, options.lens);
  GenerationResult result;
  for (int t = 0; t < options.max_tokens; ++t) {
    StepTrace trace = session.Step();
    const TokenId token = Argmax(trace.Logits(L));
    trace.chosen_token = token;
    result.tokens.push_back(token);
    if (options.capture != CaptureLevel::kNone) {
      result.traces.push_back(CaptureAs(trace, options.capture, options.topk));
    }
    if (token == model.config().eos_token_id) {
      result.stopped_on_eos = true;
      break;
    }
    if (t + 1 == options.max_tokens) break;
    if (session.AtCapacity()) {
      result.truncated = true;
      break;
    }
    session.Append(token);
  }
  return result;
}

}  // namespace eeprof
