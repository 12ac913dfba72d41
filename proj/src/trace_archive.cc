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

#include "eeprof/trace_archive.h"

#include <cstring>

#include "byte_io.h"
#include "eeprof/error.h"
#include "json.hpp"

namespace eeprof {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'E', 'E', 'P', 'T', 'R', 'A', 'C', 'E'};

void CheckHeader(const TraceArchiveHeader& h) {
  if (h.num_layers < 1 || h.d_model < 1 || h.vocab_size < 1) {
    throw ValidationError("trace archive: dimensions must be positive");
  }
  if (h.capture == CaptureLevel::kNone) {
    throw ValidationError("trace archive: capture level 'none' has no records");
  }
  if (h.topk < 1 || h.topk > h.vocab_size) {
    throw ValidationError("trace archive: top-K outside [1, vocab_size]");
  }
  if (!h.prompts.empty()) {
    int64_t total = 0;
    for (const auto& p : h.prompts) total += p.steps;
    if (total != h.step_count) {
      throw ValidationError("trace archive: prompt spans cover " +
                            std::to_string(total) + " steps, manifest says " +
                            std::to_string(h.step_count));
    }
  }
}

size_t RecordBytes(const TraceArchiveHeader& h) {
  size_t bytes = static_cast<size_t>(h.topk) * 8;
  if (h.capture == CaptureLevel::kFull) {
    bytes += (static_cast<size_t>(h.d_model) + h.vocab_size) * 4;
  }
  return bytes;
}

void CheckStep(const TraceArchiveHeader& h, const StepTrace& t, size_t index) {
  const std::string where = "trace archive step " + std::to_string(index);
  if (t.num_layers != h.num_layers || t.d_model != h.d_model ||
      t.vocab_size != h.vocab_size) {
    throw ValidationError(where + ": dimensions disagree with manifest");
  }
  const bool full = h.capture == CaptureLevel::kFull;
  if (full != t.has_hidden() || full != t.has_logits()) {
    throw ValidationError(where + ": fields do not match capture level '" +
                          ToString(h.capture) + "'");
  }
  if (t.topk.size() != static_cast<size_t>(h.num_layers) ||
      t.topk_k() != h.topk) {
    throw ValidationError(where + ": missing or mis-sized top-K digests");
  }
  for (const auto& d : t.topk) {
    if (d.ids.size() != d.values.size() ||
        d.ids.size() != static_cast<size_t>(h.topk)) {
      throw ValidationError(where + ": malformed top-K digest");
    }
  }
}

json HeaderToJson(const TraceArchiveHeader& h) {
  json prompts = json::array();
  for (const auto& p : h.prompts) {
    prompts.push_back({{"id", p.id}, {"steps", p.steps}});
  }
  json j = {{"model_id", h.model_id}};
  if (!h.dataset_id.empty()) j["dataset_id"] = h.dataset_id;
  j["num_layers"] = h.num_layers;
  j["d_model"] = h.d_model;
  j["vocab_size"] = h.vocab_size;
  j["capture"] = ToString(h.capture);
  j["topk"] = h.topk;
  j["step_count"] = h.step_count;
  j["record_count"] = h.step_count * h.num_layers;
  j["prompts"] = std::move(prompts);
  return j;
}

TraceArchiveHeader HeaderFromJson(const json& j) {
  TraceArchiveHeader h;
  try {
    h.model_id = j.at("model_id").get<std::string>();
    h.dataset_id = j.value("dataset_id", "");
    h.num_layers = j.at("num_layers").get<int>();
    h.d_model = j.at("d_model").get<int>();
    h.vocab_size = j.at("vocab_size").get<int>();
    h.capture = ParseCaptureLevel(j.at("capture").get<std::string>());
    h.topk = j.at("topk").get<int>();
    h.step_count = j.at("step_count").get<int64_t>();
    const auto records = j.at("record_count").get<int64_t>();
    if (records != h.step_count * h.num_layers) {
      throw ValidationError("trace archive: record_count " +
                            std::to_string(records) + " != step_count x L (" +
                            std::to_string(h.step_count * h.num_layers) + ")");
    }
    if (j.contains("prompts")) {
      for (const auto& p : j.at("prompts")) {
        h.prompts.push_back(
            {p.at("id").get<std::string>(), p.at("steps").get<int64_t>()});
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("trace archive: bad manifest: ") +
                          e.what());
  }
  if (h.step_count < 0) {
    throw ValidationError("trace archive: negative step_count");
  }
  return h;
}

}  // namespace

std::string EncodeTraceArchive(const TraceArchive& archive) {
  TraceArchiveHeader h = archive.header;
  h.step_count = static_cast<int64_t>(archive.steps.size());
  CheckHeader(h);
  for (size_t i = 0; i < archive.steps.size(); ++i) {
    CheckStep(h, archive.steps[i], i);
  }
  const std::string manifest = HeaderToJson(h).dump();
  std::string out(kMagic, sizeof(kMagic));
  internal::AppendU32(out, kTraceArchiveVersion);
  internal::AppendU32(out, static_cast<uint32_t>(manifest.size()));
  out += manifest;
  out.reserve(out.size() + archive.steps.size() *
                               (8 + RecordBytes(h) * h.num_layers));
  for (const StepTrace& t : archive.steps) {
    internal::AppendU32(out, static_cast<uint32_t>(t.step));
    internal::AppendU32(out, static_cast<uint32_t>(t.chosen_token));
    for (int layer = 1; layer <= h.num_layers; ++layer) {
      if (h.capture == CaptureLevel::kFull) {
        internal::AppendF32(out, t.Hidden(layer));
        internal::AppendF32(out, t.Logits(layer));
      }
      const TopKDigest& d = t.TopK(layer);
      for (TokenId id : d.ids) internal::AppendU32(out, static_cast<uint32_t>(id));
      internal::AppendF32(out, d.values);
    }
  }
  return out;
}

TraceArchive DecodeTraceArchive(const std::string& bytes) {
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
    throw ValidationError("trace archive: bad magic");
  }
  const uint32_t version = internal::ReadU32(bytes.data() + 8);
  if (version != kTraceArchiveVersion) {
    throw ValidationError("trace archive: unknown version " +
                          std::to_string(version));
  }
  const uint32_t manifest_len = internal::ReadU32(bytes.data() + 12);
  if (bytes.size() - 16 < manifest_len) {
    throw ValidationError("trace archive: truncated manifest");
  }
  json manifest;
  try {
    manifest = json::parse(bytes.substr(16, manifest_len));
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("trace archive: malformed manifest: ") +
                          e.what());
  }
  TraceArchive archive;
  archive.header = HeaderFromJson(manifest);
  const TraceArchiveHeader& h = archive.header;
  CheckHeader(h);

  const size_t step_bytes = 8 + RecordBytes(h) * h.num_layers;
  const size_t payload = bytes.size() - 16 - manifest_len;
  const size_t expected = step_bytes * static_cast<size_t>(h.step_count);
  if (payload != expected) {
    throw ValidationError("trace archive: payload is " +
                          std::to_string(payload) + " bytes, manifest implies " +
                          std::to_string(expected) +
                          (payload < expected ? " (truncated)" : ""));
  }

  const char* p = bytes.data() + 16 + manifest_len;
  archive.steps.reserve(h.step_count);
  for (int64_t s = 0; s < h.step_count; ++s) {
    StepTrace t;
    t.step = static_cast<int>(internal::ReadU32(p));
    t.chosen_token = static_cast<TokenId>(internal::ReadU32(p + 4));
    p += 8;
    t.num_layers = h.num_layers;
    t.d_model = h.d_model;
    t.vocab_size = h.vocab_size;
    if (h.capture == CaptureLevel::kFull) {
      t.hidden.resize(static_cast<size_t>(h.num_layers) * h.d_model);
      t.logits.resize(static_cast<size_t>(h.num_layers) * h.vocab_size);
    }
    t.topk.resize(h.num_layers);
    for (int layer = 0; layer < h.num_layers; ++layer) {
      if (h.capture == CaptureLevel::kFull) {
        internal::ReadF32(p, std::span<float>(t.hidden).subspan(
                                 static_cast<size_t>(layer) * h.d_model, h.d_model));
        p += static_cast<size_t>(h.d_model) * 4;
        internal::ReadF32(p, std::span<float>(t.logits).subspan(
                                 static_cast<size_t>(layer) * h.vocab_size,
                                 h.vocab_size));
        p += static_cast<size_t>(h.vocab_size) * 4;
      }
      TopKDigest& d = t.topk[layer];
      d.ids.resize(h.topk);
      d.values.resize(h.topk);
      for (int i = 0; i < h.topk; ++i) {
        const uint32_t id = internal::ReadU32(p + 4 * i);
        if (id >= static_cast<uint32_t>(h.vocab_size)) {
          throw ValidationError("trace archive: step " + std::to_string(s) +
                                " layer " + std::to_string(layer + 1) +
                                ": top-K id outside vocabulary");
        }
        d.ids[i] = static_cast<TokenId>(id);
      }
      p += static_cast<size_t>(h.topk) * 4;
      internal::ReadF32(p, d.values);
      p += static_cast<size_t>(h.topk) * 4;
    }
    archive.steps.push_back(std::move(t));
  }
  return archive;
}

void WriteTraceArchive(const std::filesystem::path& path,
                       const TraceArchive& archive) {
  internal::WriteFileBytes(path.string(), EncodeTraceArchive(archive));
}

TraceArchive ReadTraceArchive(const std::filesystem::path& path) {
  return DecodeTraceArchive(internal::ReadFileBytes(path.string()));
}

}  // namespace eeprof
