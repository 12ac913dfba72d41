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

#include "eeprof/dataset.h"

#include <algorithm>
#include <set>

#include "byte_io.h"
#include "eeprof/error.h"
#include "json.hpp"

namespace eeprof {
namespace {

using nlohmann::json;

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<std::string> Scalar(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<int64_t>());
  if (it->is_number()) return it->dump();
  return std::nullopt;
}

std::optional<std::string> FirstOf(const json& obj,
                                   std::initializer_list<const char*> keys) {
  for (const char* k : keys) {
    if (auto v = Scalar(obj, k)) return v;
  }
  return std::nullopt;
}

TaskItem ParseItem(const json& obj, TaskKind task, const std::string& where,
                   size_t line) {
  auto fail = [&](const std::string& msg) -> ValidationError {
    return ValidationError(where + ":" + std::to_string(line) + ": " + msg);
  };
  if (!obj.is_object()) throw fail("expected a JSON object");
  TaskItem item;
  item.task = task;
  item.id = Scalar(obj, "id").value_or(std::to_string(line));

  auto require = [&](const char* field, std::initializer_list<const char*> keys) {
    auto v = FirstOf(obj, keys);
    if (!v) throw fail("missing field '" + std::string(field) + "'");
    item.fields[field] = *v;
  };

  std::optional<std::string> ref;
  switch (task) {
    case TaskKind::kGsm8k: {
      require("question", {"question"});
      ref = FirstOf(obj, {"reference", "answer"});
      if (ref) {
        const auto hashes = ref->rfind("####");
        if (hashes != std::string::npos) ref = ref->substr(hashes + 4);
        ref = Trim(*ref);
      }
      break;
    }
    case TaskKind::kMmlu:
    case TaskKind::kGpqa: {
      if (task == TaskKind::kMmlu) {
        require("input", {"input", "question"});
      } else {
        require("question", {"question"});
      }
      for (const char* letter : {"A", "B", "C", "D"}) require(letter, {letter});
      ref = FirstOf(obj, {"reference", "answer", "target"});
      if (ref) {
        ref = Trim(*ref);
        if (ref->size() != 1 || (*ref)[0] < 'A' || (*ref)[0] > 'D') {
          throw fail("multiple-choice reference must be one of A, B, C, D");
        }
      }
      break;
    }
    case TaskKind::kHumanEval:
      require("prompt", {"prompt"});
      ref = FirstOf(obj, {"reference", "canonical_solution"});
      break;
  }
  if (!ref || ref->empty()) throw fail("missing field 'reference'");
  item.reference = *ref;
  return item;
}

}  // namespace

std::vector<TaskItem> ParseDataset(std::string_view content, TaskKind task,
                                   const std::string& source) {
  std::vector<TaskItem> items;
  std::set<std::string> ids;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos <= content.size()) {
    const size_t end = std::min(content.find('\n', pos), content.size());
    const std::string_view line = content.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (Trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": malformed JSON: " + e.what());
    }
    TaskItem item = ParseItem(obj, task, source, line_no);
    if (!ids.insert(item.id).second) {
      throw ValidationError(source + ":" + std::to_string(line_no) +
                            ": duplicate id '" + item.id + "'");
    }
    items.push_back(std::move(item));
  }
  return items;
}

std::vector<TaskItem> LoadDataset(const std::filesystem::path& path,
                                  TaskKind task) {
  return ParseDataset(internal::ReadFileBytes(path.string()), task,
                      path.string());
}

Digest SubsetKey(std::string_view seed, std::string_view id) {
  std::string input(seed);
  input.push_back('\x1F');
  input.append(id);
  return Sha256(input);
}

std::vector<TaskItem> SelectSubset(std::vector<TaskItem> items,
                                   std::string_view seed, size_t n) {
  if (n < 1) throw ValidationError("subset size must be >= 1");
  std::vector<std::pair<Digest, size_t>> keyed;
  keyed.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    keyed.emplace_back(SubsetKey(seed, items[i].id), i);
  }
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return items[a.second].id < items[b.second].id;
  });
  std::vector<TaskItem> out;
  const size_t take = std::min(n, items.size());
  out.reserve(take);
  for (size_t i = 0; i < take; ++i) {
    out.push_back(std::move(items[keyed[i].second]));
  }
  return out;
}

}  // namespace eeprof
