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

#include "eeprof/pipeline.h"

#include <cmath>

#include "byte_io.h"
#include "eeprof/error.h"
#include "eeprof/parallel.h"
#include "eeprof/transformer.h"

namespace eeprof {
namespace {

SignalOptions MakeSignalOptions(const RunConfig& c) {
  SignalOptions o;
  o.logits_as_probabilities = c.logits_as_probabilities;
  return o;
}

LensOptions MakeLens(const RunConfig& c) {
  LensOptions l;
  l.apply_final_norm = c.lens_final_norm;
  return l;
}

Json ConfigJson(const RunConfig& c, Command command) {
  return {{"command", ToString(command)},
          {"model", c.model_path},
          {"dataset", c.dataset_path},
          {"task", ToString(c.task)},
          {"subset_n", c.subset_n},
          {"seed", c.seed},
          {"max_tokens", c.max_tokens},
          {"signal", c.signal.Name()},
          {"topk", c.topk},
          {"alpha", c.alpha},
          {"delta", c.delta},
          {"grid", {c.grid_lo, c.grid_hi, c.grid_step}},
          {"max_loss", c.max_loss},
          {"capture", ToString(c.capture)},
          {"epsilon", c.epsilon},
          {"workers", c.workers},
          {"lens_final_norm", c.lens_final_norm},
          {"logits_as_probabilities", c.logits_as_probabilities}};
}

class Writer {
 public:
  Writer(const RunConfig& config, Command command)
      : dir_(config.out_dir), metadata_({{"config", ConfigJson(config, command)}}) {
    std::filesystem::create_directories(dir_);
  }

  void Report(const std::string& kind, Json payload) {
    const Json doc = MakeDocument(kind, std::move(payload), metadata_);
    ValidateReport(doc);
    const auto path = dir_ / (kind + ".json");
    WriteJson(path, doc);
    files_.push_back(path);
  }

  void Csv(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    internal::WriteFileBytes(path.string(), content);
    files_.push_back(path);
  }

  void Archive(const std::filesystem::path& path, const TraceArchive& a) {
    WriteTraceArchive(path, a);
    files_.push_back(path);
  }

  std::vector<std::filesystem::path> Files() const { return files_; }

 private:
  std::filesystem::path dir_;
  Json metadata_;
  std::vector<std::filesystem::path> files_;
};

EasParams MakeEasParams(const RunConfig& c) {
  EasParams p;
  p.alpha = c.alpha;
  p.signal = c.signal;
  return p;
}

OracleParams MakeOracleParams(const RunConfig& c) {
  OracleParams p;
  p.delta = c.delta;
  p.signal = c.signal;
  p.max_tokens = c.max_tokens;
  p.signal_options = MakeSignalOptions(c);
  p.lens = MakeLens(c);
  return p;
}

}  // namespace

std::string ToString(Command c) {
  switch (c) {
    case Command::kProfile:
      return "profile";
    case Command::kEas:
      return "eas";
    case Command::kOracle:
      return "oracle";
    case Command::kSearch:
      return "search";
    case Command::kEval:
      return "eval";
    case Command::kReplay:
      return "replay";
  }
  return "profile";
}

Command ParseCommand(const std::string& s) {
  for (Command c : {Command::kProfile, Command::kEas, Command::kOracle,
                    Command::kSearch, Command::kEval, Command::kReplay}) {
    if (ToString(c) == s) return c;
  }
  throw ValidationError("unknown command '" + s + "'");
}

void RunConfig::Validate(Command command) const {
  if (subset_n < 1) throw ValidationError("--subset-n must be >= 1");
  if (max_tokens < 1) throw ValidationError("--max-tokens must be >= 1");
  if (topk < 1) throw ValidationError("--topk must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ValidationError("--alpha must lie in [0, 1]");
  }
  if (!std::isfinite(delta)) throw ValidationError("--delta must be finite");
  if (!(max_loss >= 0.0)) throw ValidationError("--max-loss must be >= 0");
  if (!(epsilon > 0.0)) throw ValidationError("--eps must be > 0");
  if (workers < 1) throw ValidationError("--workers must be >= 1");
  if (command == Command::kReplay) {
    if (trace_path.empty()) throw ValidationError("replay needs --trace");
    return;
  }
  if (dataset_path.empty()) throw ValidationError("--dataset is required");
  if ((command == Command::kProfile || command == Command::kEas) &&
      capture == CaptureLevel::kNone) {
    throw ValidationError("--capture none leaves nothing to profile");
  }
  if ((command == Command::kOracle || command == Command::kSearch ||
       command == Command::kEval) &&
      task == TaskKind::kHumanEval) {
    throw ValidationError("task 'humaneval' has no scorer; only prompt "
                          "rendering is supported");
  }
  if (command == Command::kSearch) MakeGrid(grid_lo, grid_hi, grid_step);
}

Model LoadModelOrFixture(const std::string& path) {
  if (path == "fixture") return MakeFixtureModel();
  return LoadModel(path);
}

std::vector<TaskItem> LoadSubset(const RunConfig& config) {
  return SelectSubset(LoadDataset(config.dataset_path, config.task),
                      config.seed, config.subset_n);
}

std::string DatasetId(const RunConfig& config) {
  return std::filesystem::path(config.dataset_path).stem().string() + ":" +
         ToString(config.task);
}

std::vector<Signal> SignalsForCapture(CaptureLevel capture, int k) {
  switch (capture) {
    case CaptureLevel::kFull:
      return {Signal::HiddenState(), Signal::OutputLogits(), Signal::TopK(k)};
    case CaptureLevel::kTopK:
      return {Signal::TopK(k)};
    case CaptureLevel::kNone:
      break;
  }
  return {};
}

LiveProfile ProfileLive(const Model& model, const std::vector<TaskItem>& items,
                        const RunConfig& config, const std::string& dataset_id,
                        bool keep_traces) {
  if (items.empty()) throw ValidationError("profile: dataset is empty");
  const auto signals = SignalsForCapture(config.capture, config.topk);
  if (signals.empty()) {
    throw ValidationError("profile: capture level has no signals");
  }
  const ProfileBuilder probe(signals, MakeSignalOptions(config));
  GenerationOptions gen;
  gen.max_tokens = config.max_tokens;
  gen.capture = config.capture;
  gen.topk = config.topk;
  gen.lens = MakeLens(config);

  const size_t n = items.size();
  std::vector<std::vector<std::vector<std::vector<double>>>> samples(n);
  std::vector<std::vector<StepTrace>> traces(keep_traces ? n : 0);
  ParallelFor(n, config.workers, [&](size_t i) {
    try {
      auto result = GreedyDecode(model, EncodeItem(model, items[i]), gen);
      for (const StepTrace& t : result.traces) {
        samples[i].push_back(probe.Samples(t));
      }
      if (keep_traces) traces[i] = std::move(result.traces);
    } catch (const ValidationError& e) {
      throw ValidationError("prompt '" + items[i].id + "': " + e.what());
    } catch (const Error& e) {
      throw Error("prompt '" + items[i].id + "': " + e.what());
    }
  });

  ProfileBuilder builder(signals, MakeSignalOptions(config));
  for (const auto& per_prompt : samples) {
    for (const auto& s : per_prompt) builder.AddSamples(s);
  }
  LiveProfile out;
  out.profile = builder.Build(model.model_id(), dataset_id);
  if (keep_traces) {
    TraceArchive archive;
    archive.header.model_id = model.model_id();
    archive.header.dataset_id = dataset_id;
    archive.header.num_layers = model.config().num_layers;
    archive.header.d_model = model.config().d_model;
    archive.header.vocab_size = model.config().vocab_size;
    archive.header.capture = config.capture;
    archive.header.topk = config.topk;
    for (size_t i = 0; i < n; ++i) {
      archive.header.prompts.push_back(
          {items[i].id, static_cast<int64_t>(traces[i].size())});
      for (auto& t : traces[i]) archive.steps.push_back(std::move(t));
    }
    archive.header.step_count = static_cast<int64_t>(archive.steps.size());
    out.archive = std::move(archive);
  }
  return out;
}

SimilarityProfile ProfileArchive(const TraceArchive& archive, int k,
                                 const SignalOptions& options) {
  if (archive.steps.empty()) {
    throw ValidationError("replay: trace archive has no steps");
  }
  std::vector<Signal> signals;
  if (archive.header.capture == CaptureLevel::kFull) {
    signals = {Signal::HiddenState(), Signal::OutputLogits(), Signal::TopK(k)};
  } else if (k <= archive.header.topk) {
    signals = {Signal::TopK(k)};
  } else {
    throw CapabilityError("replay: archive digests hold top-" +
                          std::to_string(archive.header.topk) +
                          ", cannot compute top-" + std::to_string(k));
  }
  ProfileBuilder builder(signals, options);
  for (const StepTrace& t : archive.steps) builder.Add(t);
  return builder.Build(archive.header.model_id,
                       archive.header.dataset_id.empty()
                           ? "trace"
                           : archive.header.dataset_id);
}

RunResult Run(const RunConfig& config, Command command) {
  config.Validate(command);
  Writer writer(config, command);
  RunResult result;

  if (command == Command::kReplay) {
    const TraceArchive archive = ReadTraceArchive(config.trace_path);
    SimilarityProfile profile =
        ProfileArchive(archive, config.topk, MakeSignalOptions(config));
    if (archive.header.dataset_id.empty()) {
      profile.dataset_id =
          std::filesystem::path(config.trace_path).stem().string();
    }
    Json eas_list = Json::array();
    for (const SignalProfile& sp : profile.signals) {
      EasParams p = MakeEasParams(config);
      p.signal = sp.signal;
      eas_list.push_back(EasToJson(ComputeEas(profile, p)));
    }
    EasParams chosen = MakeEasParams(config);
    if (!profile.Has(chosen.signal)) {
      throw CapabilityError("replay: archive cannot provide the '" +
                            chosen.signal.Name() + "' signal");
    }
    const EasReport eas = ComputeEas(profile, chosen);
    Json trace_info = {{"model_id", archive.header.model_id},
                       {"num_layers", archive.header.num_layers},
                       {"capture", ToString(archive.header.capture)},
                       {"topk", archive.header.topk},
                       {"step_count", archive.header.step_count}};
    writer.Report("replay", {{"trace", trace_info},
                             {"profile", ProfileToJson(profile)},
                             {"eas", eas_list}});
    writer.Csv("profile.csv", ProfileCsv(profile));
    writer.Csv("eas.csv", EasCsv(eas));
    result.summary = {{"command", "replay"},
                      {"steps", archive.header.step_count},
                      {"signal", chosen.signal.Name()},
                      {"eas", eas.eas}};
    result.files = writer.Files();
    return result;
  }

  const Model model = LoadModelOrFixture(config.model_path);
  const std::vector<TaskItem> items = LoadSubset(config);
  if (items.empty()) throw ValidationError("dataset is empty");
  const std::string dataset_id = DatasetId(config);

  switch (command) {
    case Command::kProfile:
    case Command::kEas: {
      LiveProfile live =
          ProfileLive(model, items, config, dataset_id, !config.trace_out.empty());
      writer.Report("profile", ProfileToJson(live.profile));
      writer.Csv("profile.csv", ProfileCsv(live.profile));
      if (live.archive) writer.Archive(config.trace_out, *live.archive);
      result.summary = {{"command", ToString(command)},
                        {"prompts", items.size()},
                        {"steps", live.profile.signals.front().layers.front().count}};
      if (command == Command::kEas) {
        const EasReport eas = ComputeEas(live.profile, MakeEasParams(config));
        writer.Report("eas", EasToJson(eas));
        writer.Csv("eas.csv", EasCsv(eas));
        result.summary["eas"] = eas.eas;
      }
      break;
    }
    case Command::kEval: {
      const Evaluator evaluator = Evaluator::ForTask(config.task, config.epsilon);
      const FullDepthResults full = RunFullDepth(
          model, items, evaluator, config.max_tokens, config.workers, MakeLens(config));
      writer.Report("eval", EvalToJson(full.eval, full.prompt_ids, config.task,
                                       evaluator.kind, dataset_id));
      result.summary = {{"command", "eval"},
                        {"prompts", items.size()},
                        {"accuracy", full.eval.accuracy}};
      break;
    }
    case Command::kOracle: {
      const Evaluator evaluator = Evaluator::ForTask(config.task, config.epsilon);
      const FullDepthResults full = RunFullDepth(
          model, items, evaluator, config.max_tokens, config.workers, MakeLens(config));
      const OracleReport report = EvaluateAtThreshold(
          model, items, MakeOracleParams(config), evaluator, full, config.workers);
      Json payload = OracleToJson(report, true);
      payload["dataset_id"] = dataset_id;
      writer.Report("oracle", std::move(payload));
      result.summary = {{"command", "oracle"},
                        {"delta", report.delta},
                        {"full_accuracy", report.full_accuracy},
                        {"accuracy", report.early_exit_accuracy},
                        {"skip_percent", report.skip_percent}};
      break;
    }
    case Command::kSearch: {
      const Evaluator evaluator = Evaluator::ForTask(config.task, config.epsilon);
      const FullDepthResults full = RunFullDepth(
          model, items, evaluator, config.max_tokens, config.workers, MakeLens(config));
      const auto grid = MakeGrid(config.grid_lo, config.grid_hi, config.grid_step);
      const SearchResult search =
          ThresholdSearch(model, items, grid, config.max_loss,
                          MakeOracleParams(config), evaluator, full, config.workers);
      writer.Report("search", SearchToJson(search, dataset_id));
      writer.Csv("search.csv", SearchCsv(search));
      result.summary = {{"command", "search"},
                        {"grid_points", grid.size()},
                        {"feasible", search.feasible},
                        {"best_delta", search.best_delta},
                        {"skip_percent", search.best().skip_percent},
                        {"accuracy_loss", search.best().accuracy_loss}};
      break;
    }
    case Command::kReplay:
      break;
  }
  result.files = writer.Files();
  return result;
}

}  // namespace eeprof
