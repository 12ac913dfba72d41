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

#ifndef EEPROF_REPORT_H_
#define EEPROF_REPORT_H_

// Report documents. Every JSON report has the shape
//   {"schema": "eeprof.<kind>", "schema_version": 1,
//    "metadata": {...},   // timestamps etc., excluded from comparisons
//    "payload": {...}}    // deterministic for identical inputs
// with CSV companions for plotting.

#include <filesystem>
#include <string>
#include <vector>

#include "eeprof/adaptability.h"
#include "eeprof/evaluators.h"
#include "eeprof/oracle.h"
#include "eeprof/signals.h"
#include "json.hpp"

namespace eeprof {

using Json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

Json ProfileToJson(const SimilarityProfile& profile);
Json EasToJson(const EasReport& report);
Json OracleToJson(const OracleReport& report, bool include_transcripts = true);
Json SearchToJson(const SearchResult& result, const std::string& dataset_id);
Json EvalToJson(const EvalReport& report, const std::vector<std::string>& ids,
                TaskKind task, EvaluatorKind evaluator,
                const std::string& dataset_id);

SimilarityProfile ProfileFromJson(const Json& payload);
EasReport EasFromJson(const Json& payload);

// Wraps a payload in the document envelope. `metadata` gets tool/version/
// creation time added.
Json MakeDocument(const std::string& kind, Json payload, Json metadata = {});

// Throws ValidationError describing the first schema violation.
void ValidateReport(const Json& document);

// Writes pretty JSON; invalid UTF-8 in strings (raw byte generations) is
// replaced with U+FFFD.
void WriteJson(const std::filesystem::path& path, const Json& document);
Json ReadJson(const std::filesystem::path& path);

std::string ProfileCsv(const SimilarityProfile& profile);
std::string EasCsv(const EasReport& report);
std::string SearchCsv(const SearchResult& result);

// One row per report: model_id, signal, alpha, eas, relative_eas (vs
// `baseline`).
std::string RelativeEasCsv(const std::vector<EasReport>& reports,
                           const EasReport& baseline);

}  // namespace eeprof

#endif  // EEPROF_REPORT_H_
