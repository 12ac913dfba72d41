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

// eeprof: early-exit profiling CLI.
//
//   eeprof profile --model fixture --dataset gsm8k.jsonl --task gsm8k --out out/
//   eeprof search  --model m.json  --dataset mmlu.jsonl --task mmlu --grid 0.5:1:0.01
//   eeprof replay  --trace run.eetrace --signal logits --alpha 0.5
//
// Exit status: 0 success, 1 validation failure, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eeprof/error.h"
#include "eeprof/pipeline.h"
#include "eeprof/report.h"
#include "eeprof/version.h"

namespace {

using eeprof::Command;
using eeprof::RunConfig;

struct Flags {
  std::string signal = "logits";
  std::string capture = "full";
  std::string task = "gsm8k";
  std::string grid = "0.50:1.00:0.01";
  std::string out = "eeprof_out";
  bool no_final_norm_lens = false;
};

void ParseGrid(const std::string& spec, RunConfig& config) {
  double v[3];
  size_t start = 0;
  for (int i = 0; i < 3; ++i) {
    const size_t colon = spec.find(':', start);
    if ((i < 2) != (colon != std::string::npos)) {
      throw eeprof::ValidationError("--grid expects lo:hi:step, got '" + spec + "'");
    }
    const std::string part = spec.substr(start, colon - start);
    try {
      size_t used = 0;
      v[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw eeprof::ValidationError("--grid: bad number '" + part + "'");
    }
    start = colon + 1;
  }
  config.grid_lo = v[0];
  config.grid_hi = v[1];
  config.grid_step = v[2];
}

void AddRunOptions(CLI::App* app, RunConfig& c, Flags& f, Command command) {
  app->add_option("--out", f.out, "Output directory")->capture_default_str();
  app->add_option("--topk", c.topk, "K for the top-K signal")->capture_default_str();
  app->add_option("--signal", f.signal, "hidden | logits | topk")
      ->capture_default_str();
  app->add_option("--alpha", c.alpha, "EAS similarity weight in [0,1]")
      ->capture_default_str();
  app->add_flag("--prob-logits", c.logits_as_probabilities,
                "Compare softmax probabilities instead of raw logits");
  if (command == Command::kReplay) {
    app->add_option("--trace", c.trace_path, "Trace archive to replay")->required();
    return;
  }
  app->add_option("--model", c.model_path,
                  "Weight manifest, or 'fixture' for the built-in test model")
      ->capture_default_str();
  app->add_option("--dataset", c.dataset_path, "Line-delimited JSON dataset")
      ->required();
  app->add_option("--task", f.task, "gsm8k | mmlu | gpqa | humaneval")
      ->capture_default_str();
  app->add_option("--subset-n", c.subset_n, "Prompts to select")->capture_default_str();
  app->add_option("--seed", c.seed, "Subset selection seed (string)")
      ->capture_default_str();
  app->add_option("--max-tokens", c.max_tokens, "Generation limit per prompt")
      ->capture_default_str();
  app->add_option("--workers", c.workers, "Concurrent decoding sessions")
      ->capture_default_str();
  app->add_flag("--no-final-norm-lens", f.no_final_norm_lens,
                "Project intermediate layers without the final norm");
  switch (command) {
    case Command::kProfile:
    case Command::kEas:
      app->add_option("--capture", f.capture, "none | topk | full")
          ->capture_default_str();
      app->add_option("--trace-out", c.trace_out, "Also write a trace archive");
      break;
    case Command::kOracle:
      app->add_option("--delta", c.delta, "Exit threshold")->capture_default_str();
      app->add_option("--eps", c.epsilon, "GSM8K numeric tolerance")
          ->capture_default_str();
      break;
    case Command::kSearch:
      app->add_option("--grid", f.grid, "Threshold grid lo:hi:step")
          ->capture_default_str();
      app->add_option("--max-loss", c.max_loss,
                      "Accuracy-loss budget (absolute fraction)")
          ->capture_default_str();
      app->add_option("--eps", c.epsilon, "GSM8K numeric tolerance")
          ->capture_default_str();
      break;
    case Command::kEval:
      app->add_option("--eps", c.epsilon, "GSM8K numeric tolerance")
          ->capture_default_str();
      break;
    case Command::kReplay:
      break;
  }
}

void Finalize(RunConfig& c, const Flags& f) {
  c.signal = eeprof::ParseSignal(f.signal, c.topk);
  c.capture = eeprof::ParseCaptureLevel(f.capture);
  c.task = eeprof::ParseTaskKind(f.task);
  c.out_dir = f.out;
  c.lens_final_norm = !f.no_final_norm_lens;
  ParseGrid(f.grid, c);
}

int RunRelative(const std::vector<std::string>& reports,
                const std::string& baseline, const std::string& out) {
  auto load = [](const std::string& path) {
    const eeprof::Json doc = eeprof::ReadJson(path);
    eeprof::ValidateReport(doc);
    if (doc.at("schema") != "eeprof.eas") {
      throw eeprof::ValidationError(path + ": not an EAS report");
    }
    return eeprof::EasFromJson(doc.at("payload"));
  };
  std::vector<eeprof::EasReport> all;
  for (const auto& r : reports) all.push_back(load(r));
  const std::string csv = eeprof::RelativeEasCsv(all, load(baseline));
  if (out.empty() || out == "-") {
    std::cout << csv;
  } else {
    std::FILE* f = std::fopen(out.c_str(), "wb");
    if (!f) throw eeprof::Error("cannot open '" + out + "'");
    std::fwrite(csv.data(), 1, csv.size(), f);
    std::fclose(f);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early-exit adaptability profiler"};
  app.set_version_flag("--version", std::string(eeprof::kVersion));
  app.require_subcommand(1);

  RunConfig config;
  Flags flags;
  std::vector<std::pair<CLI::App*, Command>> runs;
  const std::pair<const char*, Command> kCommands[] = {
      {"profile", Command::kProfile}, {"eas", Command::kEas},
      {"oracle", Command::kOracle},   {"search", Command::kSearch},
      {"eval", Command::kEval},       {"replay", Command::kReplay}};
  const char* kHelp[] = {
      "Per-layer similarity profile over greedy decoding",
      "Profile plus the early-exit adaptability score",
      "Oracle early-exit decoding at one threshold",
      "Threshold search under an accuracy-loss budget",
      "Full-depth task accuracy",
      "Profile and EAS from a trace archive"};
  for (size_t i = 0; i < std::size(kCommands); ++i) {
    CLI::App* sub = app.add_subcommand(kCommands[i].first, kHelp[i]);
    AddRunOptions(sub, config, flags, kCommands[i].second);
    runs.emplace_back(sub, kCommands[i].second);
  }

  std::vector<std::string> rel_reports;
  std::string rel_baseline, rel_out;
  CLI::App* relative =
      app.add_subcommand("relative", "Relative EAS table (CSV) from eas.json files");
  relative->add_option("reports", rel_reports, "EAS report files")->required();
  relative->add_option("--baseline", rel_baseline, "Baseline EAS report")->required();
  relative->add_option("--out", rel_out, "CSV output path (default stdout)");

  std::string fixture_out = "fixture_model";
  CLI::App* fixture =
      app.add_subcommand("make-fixture", "Write the deterministic test model");
  fixture->add_option("--out", fixture_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (relative->parsed()) return RunRelative(rel_reports, rel_baseline, rel_out);
    if (fixture->parsed()) {
      const auto path = eeprof::SaveModel(eeprof::MakeFixtureModel(), fixture_out);
      std::cout << path.string() << "\n";
      return 0;
    }
    for (const auto& [sub, command] : runs) {
      if (!sub->parsed()) continue;
      Finalize(config, flags);
      const eeprof::RunResult result = eeprof::Run(config, command);
      std::cout << result.summary.dump(2) << "\n";
      for (const auto& f : result.files) std::cerr << "wrote " << f.string() << "\n";
      return 0;
    }
  } catch (const eeprof::ValidationError& e) {
    std::cerr << "eeprof: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "eeprof: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
