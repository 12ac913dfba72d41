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

#include "eeprof/report.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>

#include "byte_io.h"
#include "eeprof/error.h"
#include "eeprof/version.h"

namespace eeprof {
namespace {

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string NowUtc() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json SignalJson(const Signal& s) {
  Json j = {{"signal", s.Name()}};
  if (s.kind == Signal::Kind::kTopK) j["k"] = s.k;
  return j;
}

Json TranscriptToJson(const ExitTranscript& t) {
  return {{"prompt_id", t.prompt_id},
          {"tokens", t.tokens},
          {"exit_layers", t.exit_layers},
          {"exit_similarity", t.exit_similarity},
          {"exit_histogram", t.exit_histogram},
          {"mean_skip_ratio", t.mean_skip_ratio},
          {"stopped_on_eos", t.stopped_on_eos},
          {"truncated", t.truncated}};
}

Json DetailsToJson(const EvalReport& r, const std::vector<std::string>& ids) {
  Json details = Json::array();
  for (size_t i = 0; i < r.details.size(); ++i) {
    const EvalDetail& d = r.details[i];
    details.push_back(
        {{"id", i < ids.size() ? ids[i] : std::to_string(i)},
         {"prompt", d.prompt},
         {"prediction", d.prediction},
         {"extracted", d.extracted ? Json(*d.extracted) : Json(nullptr)},
         {"reference", d.reference},
         {"is_correct", d.is_correct}});
  }
  return details;
}

enum class Type { kString, kNumber, kInteger, kBool, kArray, kObject };

bool Matches(const Json& v, Type t) {
  switch (t) {
    case Type::kString:
      return v.is_string();
    case Type::kNumber:
      return v.is_number();
    case Type::kInteger:
      return v.is_number_integer();
    case Type::kBool:
      return v.is_boolean();
    case Type::kArray:
      return v.is_array();
    case Type::kObject:
      return v.is_object();
  }
  return false;
}

using FieldSpec = std::vector<std::pair<const char*, Type>>;

void Require(const Json& obj, const FieldSpec& spec, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, type] : spec) {
    if (!obj.contains(key)) {
      throw ValidationError(where + ": missing '" + key + "'");
    }
    if (!Matches(obj.at(key), type)) {
      throw ValidationError(where + ": '" + key + "' has the wrong type");
    }
  }
}

void RequireUnit(const Json& obj, const char* key, double lo, double hi,
                 const std::string& where) {
  const double v = obj.at(key).get<double>();
  if (!(v >= lo - 1e-12 && v <= hi + 1e-12)) {
    throw ValidationError(where + ": '" + key + "' outside [" + Num(lo) +
                          ", " + Num(hi) + "]");
  }
}

const FieldSpec kProfileSpec = {{"model_id", Type::kString},
                                {"dataset_id", Type::kString},
                                {"num_layers", Type::kInteger},
                                {"signals", Type::kArray}};
const FieldSpec kEasSpec = {{"model_id", Type::kString},
                            {"num_layers", Type::kInteger},
                            {"alpha", Type::kNumber},
                            {"signal", Type::kString},
                            {"mapping", Type::kString},
                            {"eas", Type::kNumber},
                            {"layers", Type::kArray}};
const FieldSpec kOracleSpec = {{"delta", Type::kNumber},
                               {"signal", Type::kString},
                               {"num_prompts", Type::kInteger},
                               {"full_accuracy", Type::kNumber},
                               {"accuracy", Type::kNumber},
                               {"accuracy_loss", Type::kNumber},
                               {"skip_percent", Type::kNumber},
                               {"generated_tokens", Type::kInteger},
                               {"exit_histogram", Type::kArray}};

void ValidateProfile(const Json& p, const std::string& where) {
  Require(p, kProfileSpec, where);
  const int L = p.at("num_layers").get<int>();
  for (const Json& s : p.at("signals")) {
    Require(s, {{"signal", Type::kString}, {"layers", Type::kArray}},
            where + ".signals");
    if (static_cast<int>(s.at("layers").size()) != L - 1) {
      throw ValidationError(where + ": signal '" +
                            s.at("signal").get<std::string>() +
                            "' must have num_layers - 1 rows");
    }
    const bool topk = s.at("signal") == "topk";
    for (const Json& row : s.at("layers")) {
      Require(row, {{"layer", Type::kInteger}, {"mean", Type::kNumber},
                    {"std", Type::kNumber}, {"count", Type::kInteger}},
              where + ".layers");
      RequireUnit(row, "mean", topk ? 0.0 : -1.0, 1.0, where);
      RequireUnit(row, "std", 0.0, 1.0, where);
    }
  }
}

void ValidateEas(const Json& p, const std::string& where) {
  Require(p, kEasSpec, where);
  RequireUnit(p, "alpha", 0.0, 1.0, where);
  RequireUnit(p, "eas", 0.0, 1.0, where);
  for (const Json& row : p.at("layers")) {
    Require(row, {{"layer", Type::kInteger}, {"skip_ratio", Type::kNumber},
                  {"mean_similarity", Type::kNumber},
                  {"mapped_similarity", Type::kNumber}, {"score", Type::kNumber}},
            where + ".layers");
    RequireUnit(row, "mapped_similarity", 0.0, 1.0, where);
    RequireUnit(row, "score", 0.0, 1.0, where);
  }
}

void ValidateOracle(const Json& p, const std::string& where) {
  Require(p, kOracleSpec, where);
  RequireUnit(p, "full_accuracy", 0.0, 1.0, where);
  RequireUnit(p, "accuracy", 0.0, 1.0, where);
  RequireUnit(p, "skip_percent", 0.0, 100.0, where);
}

}  // namespace

Json ProfileToJson(const SimilarityProfile& profile) {
  Json signals = Json::array();
  for (const SignalProfile& sp : profile.signals) {
    Json s = SignalJson(sp.signal);
    Json layers = Json::array();
    for (size_t i = 0; i < sp.layers.size(); ++i) {
      layers.push_back({{"layer", static_cast<int>(i) + 1},
                        {"mean", sp.layers[i].mean},
                        {"std", sp.layers[i].std},
                        {"count", sp.layers[i].count}});
    }
    s["layers"] = std::move(layers);
    signals.push_back(std::move(s));
  }
  Json j = {{"model_id", profile.model_id},
            {"dataset_id", profile.dataset_id},
            {"num_layers", profile.num_layers},
            {"signals", std::move(signals)}};
  if (profile.Has(Signal::OutputLogits()) && profile.num_layers >= 3) {
    const auto& rows = profile.For(Signal::OutputLogits()).layers;
    const double first = rows.front().mean;
    const double last = rows.back().mean;
    j["sanity"] = {{"signal", "logits"},
                   {"first_layer_mean", first},
                   {"last_intermediate_mean", last},
                   {"late_exceeds_early", last > first}};
  }
  return j;
}

SimilarityProfile ProfileFromJson(const Json& p) {
  ValidateProfile(p, "profile");
  SimilarityProfile profile;
  profile.model_id = p.at("model_id").get<std::string>();
  profile.dataset_id = p.at("dataset_id").get<std::string>();
  profile.num_layers = p.at("num_layers").get<int>();
  for (const Json& s : p.at("signals")) {
    SignalProfile sp;
    sp.signal = ParseSignal(s.at("signal").get<std::string>(), s.value("k", 10));
    for (const Json& row : s.at("layers")) {
      sp.layers.push_back({row.at("mean").get<double>(),
                           row.at("std").get<double>(),
                           row.at("count").get<int64_t>()});
    }
    profile.signals.push_back(std::move(sp));
  }
  return profile;
}

Json EasToJson(const EasReport& r) {
  Json layers = Json::array();
  for (const EasLayer& l : r.layers) {
    layers.push_back({{"layer", l.layer},
                      {"skip_ratio", l.skip_ratio},
                      {"mean_similarity", l.mean_similarity},
                      {"mapped_similarity", l.mapped_similarity},
                      {"score", l.score}});
  }
  Json j = {{"model_id", r.model_id},
            {"num_layers", r.num_layers},
            {"alpha", r.params.alpha},
            {"signal", r.params.signal.Name()}};
  if (r.params.signal.kind == Signal::Kind::kTopK) j["k"] = r.params.signal.k;
  j["mapping"] = ToString(r.params.EffectiveMapping());
  j["eas"] = r.eas;
  j["layers"] = std::move(layers);
  return j;
}

EasReport EasFromJson(const Json& p) {
  ValidateEas(p, "eas");
  EasReport r;
  r.model_id = p.at("model_id").get<std::string>();
  r.num_layers = p.at("num_layers").get<int>();
  r.params.alpha = p.at("alpha").get<double>();
  r.params.signal =
      ParseSignal(p.at("signal").get<std::string>(), p.value("k", 10));
  r.params.mapping = p.at("mapping") == "identity" ? SimilarityMapping::kIdentity
                                                   : SimilarityMapping::kLinear;
  r.eas = p.at("eas").get<double>();
  for (const Json& row : p.at("layers")) {
    r.layers.push_back({row.at("layer").get<int>(),
                        row.at("skip_ratio").get<double>(),
                        row.at("mean_similarity").get<double>(),
                        row.at("mapped_similarity").get<double>(),
                        row.at("score").get<double>()});
  }
  return r;
}

Json OracleToJson(const OracleReport& r, bool include_transcripts) {
  Json j = {{"delta", r.delta}, {"signal", r.signal.Name()}};
  if (r.signal.kind == Signal::Kind::kTopK) j["k"] = r.signal.k;
  j["num_prompts"] = r.num_prompts;
  j["full_accuracy"] = r.full_accuracy;
  j["accuracy"] = r.early_exit_accuracy;
  j["accuracy_loss"] = r.accuracy_loss;
  j["skip_percent"] = r.skip_percent;
  j["full_correct"] = r.full_correct;
  j["correct"] = r.early_exit_correct;
  j["generated_tokens"] = r.generated_tokens;
  j["exit_histogram"] = r.exit_histogram;
  if (include_transcripts) {
    Json ts = Json::array();
    for (const auto& t : r.transcripts) ts.push_back(TranscriptToJson(t));
    j["transcripts"] = std::move(ts);
    j["details"] = DetailsToJson(r.early_exit_eval, r.prompt_ids);
  }
  return j;
}

Json SearchToJson(const SearchResult& result, const std::string& dataset_id) {
  Json grid = Json::array();
  for (const auto& r : result.reports) grid.push_back(OracleToJson(r, false));
  return {{"dataset_id", dataset_id},
          {"max_loss", result.max_loss},
          {"feasible", result.feasible},
          {"best_delta", result.best_delta},
          {"best_index", result.best_index},
          {"best", OracleToJson(result.best(), true)},
          {"grid", std::move(grid)}};
}

Json EvalToJson(const EvalReport& report, const std::vector<std::string>& ids,
                TaskKind task, EvaluatorKind evaluator,
                const std::string& dataset_id) {
  return {{"dataset_id", dataset_id},
          {"task", ToString(task)},
          {"evaluator", ToString(evaluator)},
          {"accuracy", report.accuracy},
          {"correct", report.correct},
          {"total", report.details.size()},
          {"details", DetailsToJson(report, ids)}};
}

Json MakeDocument(const std::string& kind, Json payload, Json metadata) {
  if (!metadata.is_object()) metadata = Json::object();
  metadata["tool"] = "eeprof";
  metadata["version"] = kVersion;
  metadata["created_at"] = NowUtc();
  return {{"schema", "eeprof." + kind},
          {"schema_version", kReportSchemaVersion},
          {"metadata", std::move(metadata)},
          {"payload", std::move(payload)}};
}

void ValidateReport(const Json& doc) {
  Require(doc, {{"schema", Type::kString}, {"schema_version", Type::kInteger},
                {"metadata", Type::kObject}, {"payload", Type::kObject}},
          "report");
  if (doc.at("schema_version") != kReportSchemaVersion) {
    throw ValidationError("report: unsupported schema_version");
  }
  const std::string schema = doc.at("schema").get<std::string>();
  const Json& p = doc.at("payload");
  if (schema == "eeprof.profile") {
    ValidateProfile(p, "profile");
  } else if (schema == "eeprof.eas") {
    ValidateEas(p, "eas");
  } else if (schema == "eeprof.oracle") {
    ValidateOracle(p, "oracle");
    Require(p, {{"transcripts", Type::kArray}, {"details", Type::kArray}},
            "oracle");
  } else if (schema == "eeprof.search") {
    Require(p, {{"dataset_id", Type::kString}, {"max_loss", Type::kNumber},
                {"feasible", Type::kBool}, {"best_delta", Type::kNumber},
                {"best_index", Type::kInteger}, {"best", Type::kObject},
                {"grid", Type::kArray}},
            "search");
    if (p.at("grid").empty()) throw ValidationError("search: empty grid");
    ValidateOracle(p.at("best"), "search.best");
    for (const Json& g : p.at("grid")) ValidateOracle(g, "search.grid");
  } else if (schema == "eeprof.eval") {
    Require(p, {{"dataset_id", Type::kString}, {"task", Type::kString},
                {"evaluator", Type::kString}, {"accuracy", Type::kNumber},
                {"correct", Type::kInteger}, {"total", Type::kInteger},
                {"details", Type::kArray}},
            "eval");
    RequireUnit(p, "accuracy", 0.0, 100.0, "eval");
    if (p.at("details").size() != p.at("total").get<size_t>()) {
      throw ValidationError("eval: details count != total");
    }
  } else if (schema == "eeprof.replay") {
    Require(p, {{"trace", Type::kObject}, {"profile", Type::kObject},
                {"eas", Type::kArray}},
            "replay");
    ValidateProfile(p.at("profile"), "replay.profile");
    for (const Json& e : p.at("eas")) ValidateEas(e, "replay.eas");
  } else {
    throw ValidationError("report: unknown schema '" + schema + "'");
  }
}

void WriteJson(const std::filesystem::path& path, const Json& document) {
  internal::WriteFileBytes(
      path.string(),
      document.dump(2, ' ', false, Json::error_handler_t::replace) + "\n");
}

Json ReadJson(const std::filesystem::path& path) {
  try {
    return Json::parse(internal::ReadFileBytes(path.string()));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": malformed JSON: " + e.what());
  }
}

std::string ProfileCsv(const SimilarityProfile& profile) {
  std::ostringstream os;
  os << "signal,k,layer,mean,std,count\n";
  for (const SignalProfile& sp : profile.signals) {
    for (size_t i = 0; i < sp.layers.size(); ++i) {
      os << sp.signal.Name() << ','
         << (sp.signal.kind == Signal::Kind::kTopK ? std::to_string(sp.signal.k)
                                                   : "")
         << ',' << i + 1 << ',' << Num(sp.layers[i].mean) << ','
         << Num(sp.layers[i].std) << ',' << sp.layers[i].count << '\n';
    }
  }
  return os.str();
}

std::string EasCsv(const EasReport& r) {
  std::ostringstream os;
  os << "layer,skip_ratio,mean_similarity,mapped_similarity,score\n";
  for (const EasLayer& l : r.layers) {
    os << l.layer << ',' << Num(l.skip_ratio) << ',' << Num(l.mean_similarity)
       << ',' << Num(l.mapped_similarity) << ',' << Num(l.score) << '\n';
  }
  return os.str();
}

std::string SearchCsv(const SearchResult& result) {
  std::ostringstream os;
  os << "delta,full_accuracy,accuracy,accuracy_loss,skip_percent,feasible,"
        "selected\n";
  for (size_t i = 0; i < result.reports.size(); ++i) {
    const OracleReport& r = result.reports[i];
    const bool feasible = r.accuracy_loss <= result.max_loss + 1e-12;
    os << Num(r.delta) << ',' << Num(r.full_accuracy) << ','
       << Num(r.early_exit_accuracy) << ',' << Num(r.accuracy_loss) << ','
       << Num(r.skip_percent) << ',' << (feasible ? 1 : 0) << ','
       << (i == result.best_index ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string RelativeEasCsv(const std::vector<EasReport>& reports,
                           const EasReport& baseline) {
  std::ostringstream os;
  os << "model_id,signal,alpha,eas,relative_eas\n";
  for (const EasReport& r : reports) {
    os << r.model_id << ',' << r.params.signal.Name() << ','
       << Num(r.params.alpha) << ',' << Num(r.eas) << ','
       << Num(RelativeEas(r, baseline)) << '\n';
  }
  return os.str();
}

}  // namespace eeprof
