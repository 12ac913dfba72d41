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

#ifndef EEPROF_MODEL_H_
#define EEPROF_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace eeprof {

using TokenId = int32_t;

struct ModelConfig {
  int num_layers = 4;
  int d_model = 64;
  int num_heads = 4;
  int d_ff = 256;
  int vocab_size = 257;
  int max_seq_len = 2048;
  TokenId eos_token_id = 256;
  float norm_eps = 1e-5f;
  float rope_theta = 10000.0f;

  int head_dim() const { return d_model / num_heads; }

  // Throws ValidationError describing the first violated invariant.
  void Validate() const;
};

struct TokenizerSpec {
  std::string scheme = "byte";
  TokenId eos_token_id = 256;
};

// A dense row-major float32 tensor.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<float> data;

  int64_t NumElements() const;
  std::span<const float> Row(int64_t r) const;
};

// Canonical tensor names for a config, in manifest order.
std::vector<std::string> ExpectedTensorNames(const ModelConfig& config);
std::vector<int64_t> ExpectedShape(const ModelConfig& config,
                                   const std::string& name);

// Weights, architecture and tokenizer for the instrumented runtime.
// Immutable after construction; safe to share across decoding sessions.
//
// Matrices are stored [in x out] so that y = x * W.
class Model {
 public:
  Model(ModelConfig config, TokenizerSpec tokenizer,
        std::map<std::string, Tensor> tensors, std::string model_id);

  const ModelConfig& config() const { return config_; }
  const TokenizerSpec& tokenizer() const { return tokenizer_; }
  const std::string& model_id() const { return model_id_; }

  const Tensor& tensor(const std::string& name) const;
  const std::map<std::string, Tensor>& tensors() const { return tensors_; }

  // Per-layer tensors, 0-based block index.
  struct Block {
    const Tensor* attn_norm;
    const Tensor* wq;
    const Tensor* wk;
    const Tensor* wv;
    const Tensor* wo;
    const Tensor* mlp_norm;
    const Tensor* w1;
    const Tensor* w2;
  };
  const Block& block(int index) const { return blocks_[index]; }
  const Tensor& token_embeddings() const { return *tok_embeddings_; }
  const Tensor& final_norm() const { return *final_norm_; }
  const Tensor& lm_head() const { return *lm_head_; }

 private:
  void Bind();

  ModelConfig config_;
  TokenizerSpec tokenizer_;
  std::map<std::string, Tensor> tensors_;
  std::string model_id_;
  std::vector<Block> blocks_;
  const Tensor* tok_embeddings_ = nullptr;
  const Tensor* final_norm_ = nullptr;
  const Tensor* lm_head_ = nullptr;
};

// Reads a weight manifest (JSON) and its float32 blob. Every failure names
// the offending tensor or field.
Model LoadModel(const std::filesystem::path& manifest_path);

// Writes `model` as <dir>/<stem>.json + <dir>/<stem>.bin. Returns the
// manifest path.
std::filesystem::path SaveModel(const Model& model,
                                const std::filesystem::path& dir,
                                const std::string& stem = "model");

// Deterministic fixture weights.
//
// Every matrix consumes, in canonical tensor order, consecutive 32-bit
// little-endian words of the stream
//   SHA-256(seed || uint64_le(0)) || SHA-256(seed || uint64_le(1)) || ...
// and maps each word u to -0.08 + 0.16 * u / 2^32 (computed in double,
// rounded to float). Normalization gains are all 1.
Model MakeFixtureModel(const ModelConfig& config = {},
                       const std::string& seed = "eeprof-fixture-v1");

// The word stream above, exposed for cross-implementation checks.
class Sha256WeightStream {
 public:
  explicit Sha256WeightStream(std::string seed) : seed_(std::move(seed)) {}
  uint32_t NextWord();
  float NextWeight();

 private:
  std::string seed_;
  uint64_t counter_ = 0;
  unsigned char block_[32] = {};
  int pos_ = 32;
};

}  // namespace eeprof

#endif  // EEPROF_MODEL_H_
