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

#include "eeprof/model.h"

#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "byte_io.h"
#include "eeprof/error.h"
#include "eeprof/sha256.h"
#include "json.hpp"

namespace eeprof {
namespace {

using nlohmann::json;

constexpr char kFormatName[] = "eeprof-weights";
constexpr int kFormatVersion = 1;

std::string ShapeString(const std::vector<int64_t>& shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ", ";
    os << shape[i];
  }
  os << ']';
  return os.str();
}

int64_t Product(const std::vector<int64_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), int64_t{1},
                         std::multiplies<>());
}

std::string LayerName(int i, const char* leaf) {
  return "layers." + std::to_string(i) + "." + leaf;
}

template <typename T>
T RequireField(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ValidationError(where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

}  // namespace

void ModelConfig::Validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) {
      throw ValidationError(std::string("model config: ") + name +
                            " must be >= 1, got " + std::to_string(v));
    }
  };
  positive(num_layers, "num_layers");
  positive(d_model, "d_model");
  positive(num_heads, "num_heads");
  positive(d_ff, "d_ff");
  positive(vocab_size, "vocab_size");
  positive(max_seq_len, "max_seq_len");
  if (d_model % num_heads != 0) {
    throw ValidationError("model config: d_model (" + std::to_string(d_model) +
                          ") is not divisible by num_heads (" +
                          std::to_string(num_heads) + ")");
  }
  if (head_dim() % 2 != 0) {
    throw ValidationError("model config: head_dim must be even for rotary "
                          "embeddings");
  }
  if (eos_token_id < 0 || eos_token_id >= vocab_size) {
    throw ValidationError("model config: eos_token_id " +
                          std::to_string(eos_token_id) +
                          " outside vocabulary of size " +
                          std::to_string(vocab_size));
  }
  if (!(norm_eps > 0.0f) || !std::isfinite(norm_eps)) {
    throw ValidationError("model config: norm_eps must be positive");
  }
  if (!(rope_theta > 0.0f) || !std::isfinite(rope_theta)) {
    throw ValidationError("model config: rope_theta must be positive");
  }
}

int64_t Tensor::NumElements() const { return Product(shape); }

std::span<const float> Tensor::Row(int64_t r) const {
  const int64_t cols = shape.back();
  return std::span<const float>(data).subspan(r * cols, cols);
}

std::vector<std::string> ExpectedTensorNames(const ModelConfig& config) {
  std::vector<std::string> names = {"tok_embeddings"};
  for (int i = 0; i < config.num_layers; ++i) {
    for (const char* leaf :
         {"attn_norm", "wq", "wk", "wv", "wo", "mlp_norm", "w1", "w2"}) {
      names.push_back(LayerName(i, leaf));
    }
  }
  names.push_back("final_norm");
  names.push_back("lm_head");
  return names;
}

std::vector<int64_t> ExpectedShape(const ModelConfig& config,
                                   const std::string& name) {
  const int64_t d = config.d_model;
  if (name == "tok_embeddings") return {config.vocab_size, d};
  if (name == "final_norm") return {d};
  if (name == "lm_head") return {d, config.vocab_size};
  const auto dot = name.rfind('.');
  const std::string leaf = dot == std::string::npos ? name : name.substr(dot + 1);
  if (leaf == "attn_norm" || leaf == "mlp_norm") return {d};
  if (leaf == "wq" || leaf == "wk" || leaf == "wv" || leaf == "wo") {
    return {d, d};
  }
  if (leaf == "w1") return {d, config.d_ff};
  if (leaf == "w2") return {config.d_ff, d};
  throw ValidationError("unknown tensor name '" + name + "'");
}

Model::Model(ModelConfig config, TokenizerSpec tokenizer,
             std::map<std::string, Tensor> tensors, std::string model_id)
    : config_(std::move(config)),
      tokenizer_(std::move(tokenizer)),
      tensors_(std::move(tensors)),
      model_id_(std::move(model_id)) {
  config_.Validate();
  if (tokenizer_.scheme != "byte") {
    throw ValidationError("tokenizer: unsupported scheme '" +
                          tokenizer_.scheme + "'");
  }
  if (tokenizer_.eos_token_id != config_.eos_token_id) {
    throw ValidationError("tokenizer: eos_token_id disagrees with config");
  }
  if (config_.vocab_size < 257 || config_.eos_token_id < 256) {
    throw ValidationError(
        "tokenizer: byte scheme needs vocab_size >= 257 and eos_token_id >= "
        "256");
  }
  for (const std::string& name : ExpectedTensorNames(config_)) {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) {
      throw ValidationError("missing tensor '" + name + "'");
    }
    const auto want = ExpectedShape(config_, name);
    if (it->second.shape != want) {
      throw ValidationError("tensor '" + name + "': shape " +
                            ShapeString(it->second.shape) + ", expected " +
                            ShapeString(want));
    }
    if (static_cast<int64_t>(it->second.data.size()) != Product(want)) {
      throw ValidationError("tensor '" + name + "': holds " +
                            std::to_string(it->second.data.size()) +
                            " values, shape " + ShapeString(want) + " needs " +
                            std::to_string(Product(want)));
    }
    for (size_t i = 0; i < it->second.data.size(); ++i) {
      if (!std::isfinite(it->second.data[i])) {
        throw ValidationError("tensor '" + name + "': non-finite value at "
                              "element " + std::to_string(i));
      }
    }
  }
  if (tensors_.size() != ExpectedTensorNames(config_).size()) {
    for (const auto& [name, t] : tensors_) {
      ExpectedShape(config_, name);  // throws on unknown names
    }
    throw ValidationError("unexpected extra tensors in model");
  }
  Bind();
}

const Tensor& Model::tensor(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw ValidationError("missing tensor '" + name + "'");
  }
  return it->second;
}

void Model::Bind() {
  blocks_.clear();
  for (int i = 0; i < config_.num_layers; ++i) {
    blocks_.push_back(Block{
        &tensor(LayerName(i, "attn_norm")), &tensor(LayerName(i, "wq")),
        &tensor(LayerName(i, "wk")),        &tensor(LayerName(i, "wv")),
        &tensor(LayerName(i, "wo")),        &tensor(LayerName(i, "mlp_norm")),
        &tensor(LayerName(i, "w1")),        &tensor(LayerName(i, "w2"))});
  }
  tok_embeddings_ = &tensor("tok_embeddings");
  final_norm_ = &tensor("final_norm");
  lm_head_ = &tensor("lm_head");
}

Model LoadModel(const std::filesystem::path& manifest_path) {
  const std::string where = manifest_path.string();
  json manifest;
  try {
    manifest = json::parse(internal::ReadFileBytes(where));
  } catch (const json::parse_error& e) {
    throw ValidationError(where + ": malformed manifest: " + e.what());
  }
  if (RequireField<std::string>(manifest, "format", where) != kFormatName) {
    throw ValidationError(where + ": not an eeprof weight manifest");
  }
  const int version = RequireField<int>(manifest, "version", where);
  if (version != kFormatVersion) {
    throw ValidationError(where + ": unsupported manifest version " +
                          std::to_string(version));
  }

  const json cfg = RequireField<json>(manifest, "config", where);
  const std::string cwhere = where + ": config";
  ModelConfig config;
  config.num_layers = RequireField<int>(cfg, "num_layers", cwhere);
  config.d_model = RequireField<int>(cfg, "d_model", cwhere);
  config.num_heads = RequireField<int>(cfg, "num_heads", cwhere);
  config.d_ff = RequireField<int>(cfg, "d_ff", cwhere);
  config.vocab_size = RequireField<int>(cfg, "vocab_size", cwhere);
  config.max_seq_len = RequireField<int>(cfg, "max_seq_len", cwhere);
  config.eos_token_id = RequireField<int>(cfg, "eos_token_id", cwhere);
  config.norm_eps = RequireField<float>(cfg, "norm_eps", cwhere);
  config.rope_theta = cfg.value("rope_theta", 10000.0f);
  config.Validate();

  const json tok = RequireField<json>(manifest, "tokenizer", where);
  TokenizerSpec tokenizer;
  tokenizer.scheme = RequireField<std::string>(tok, "scheme", where + ": tokenizer");
  tokenizer.eos_token_id = RequireField<int>(tok, "eos_token_id", where + ": tokenizer");

  const auto blob_path = manifest_path.parent_path() /
                         RequireField<std::string>(manifest, "blob", where);
  const std::string blob = internal::ReadFileBytes(blob_path.string());

  std::map<std::string, json> entries;
  for (const json& e : RequireField<json>(manifest, "tensors", where)) {
    const auto name = RequireField<std::string>(e, "name", where + ": tensor entry");
    if (!entries.emplace(name, e).second) {
      throw ValidationError("tensor '" + name + "': declared twice");
    }
  }

  std::map<std::string, Tensor> tensors;
  for (const std::string& name : ExpectedTensorNames(config)) {
    auto it = entries.find(name);
    if (it == entries.end()) {
      throw ValidationError("missing tensor '" + name + "'");
    }
    const std::string twhere = "tensor '" + name + "'";
    Tensor t;
    t.shape = RequireField<std::vector<int64_t>>(it->second, "shape", twhere);
    const auto offset = RequireField<uint64_t>(it->second, "offset", twhere);
    const auto length = RequireField<uint64_t>(it->second, "length", twhere);
    const auto want = ExpectedShape(config, name);
    if (t.shape != want) {
      throw ValidationError(twhere + ": declared shape " +
                            ShapeString(t.shape) + ", config expects " +
                            ShapeString(want));
    }
    const uint64_t need = static_cast<uint64_t>(Product(t.shape)) * 4;
    if (length != need) {
      throw ValidationError(twhere + ": shape " + ShapeString(t.shape) +
                            " needs " + std::to_string(need) +
                            " bytes but entry declares " +
                            std::to_string(length));
    }
    if (offset > blob.size() || length > blob.size() - offset) {
      throw ValidationError(twhere + ": byte range [" + std::to_string(offset) +
                            ", " + std::to_string(offset + length) +
                            ") exceeds blob size " +
                            std::to_string(blob.size()));
    }
    t.data.resize(Product(t.shape));
    internal::ReadF32(blob.data() + offset, t.data);
    tensors.emplace(name, std::move(t));
    entries.erase(it);
  }
  if (!entries.empty()) {
    throw ValidationError("unexpected tensor '" + entries.begin()->first + "'");
  }
  return Model(config, tokenizer, std::move(tensors),
               manifest.value("model_id", manifest_path.stem().string()));
}

std::filesystem::path SaveModel(const Model& model,
                                const std::filesystem::path& dir,
                                const std::string& stem) {
  std::filesystem::create_directories(dir);
  const ModelConfig& c = model.config();
  json manifest = {
      {"format", kFormatName},
      {"version", kFormatVersion},
      {"model_id", model.model_id()},
      {"config",
       {{"num_layers", c.num_layers},
        {"d_model", c.d_model},
        {"num_heads", c.num_heads},
        {"d_ff", c.d_ff},
        {"vocab_size", c.vocab_size},
        {"max_seq_len", c.max_seq_len},
        {"eos_token_id", c.eos_token_id},
        {"norm_eps", c.norm_eps},
        {"rope_theta", c.rope_theta}}},
      {"tokenizer",
       {{"scheme", model.tokenizer().scheme},
        {"eos_token_id", model.tokenizer().eos_token_id}}},
      {"blob", stem + ".bin"},
      {"tensors", json::array()}};
  std::string blob;
  for (const std::string& name : ExpectedTensorNames(c)) {
    const Tensor& t = model.tensor(name);
    const uint64_t offset = blob.size();
    internal::AppendF32(blob, t.data);
    manifest["tensors"].push_back({{"name", name},
                                   {"shape", t.shape},
                                   {"offset", offset},
                                   {"length", blob.size() - offset}});
  }
  const auto manifest_path = dir / (stem + ".json");
  internal::WriteFileBytes((dir / (stem + ".bin")).string(), blob);
  internal::WriteFileBytes(manifest_path.string(), manifest.dump(2) + "\n");
  return manifest_path;
}

uint32_t Sha256WeightStream::NextWord() {
  if (pos_ == 32) {
    std::string input = seed_;
    internal::AppendU64(input, counter_++);
    const Digest d = Sha256(input);
    std::memcpy(block_, d.data(), 32);
    pos_ = 0;
  }
  const uint32_t word = internal::ReadU32(reinterpret_cast<char*>(block_) + pos_);
  pos_ += 4;
  return word;
}

float Sha256WeightStream::NextWeight() {
  const double u = static_cast<double>(NextWord()) / 4294967296.0;
  return static_cast<float>(-0.08 + 0.16 * u);
}

Model MakeFixtureModel(const ModelConfig& config, const std::string& seed) {
  config.Validate();
  Sha256WeightStream stream(seed);
  std::map<std::string, Tensor> tensors;
  for (const std::string& name : ExpectedTensorNames(config)) {
    Tensor t;
    t.shape = ExpectedShape(config, name);
    t.data.resize(Product(t.shape));
    if (t.shape.size() == 1) {
      std::fill(t.data.begin(), t.data.end(), 1.0f);
    } else {
      for (float& v : t.data) v = stream.NextWeight();
    }
    tensors.emplace(name, std::move(t));
  }
  TokenizerSpec tok{"byte", config.eos_token_id};
  return Model(config, tok, std::move(tensors), "fixture-" + seed);
}

}  // namespace eeprof
