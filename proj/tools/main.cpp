// Copyright 2026 The tagvalid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pipeline.hpp"
#include "tagvalid/error.hpp"

namespace {

using tagvalid::cli::ExperimentConfig;

struct Stage {
  const char* name;
  const char* help;
  int (*run)(const ExperimentConfig&);
};

constexpr Stage kStages[] = {
    {"synth", "Generate the synthetic dataset and its manifest", tagvalid::cli::cmd_synth},
    {"folds", "Reduce tags to Vocals/Non-Vocals and build artist-filtered folds", tagvalid::cli::cmd_folds},
    {"extract", "Extract and cache features for every clip", tagvalid::cli::cmd_extract},
    {"train", "Train every configured system on every fold", tagvalid::cli::cmd_train},
    {"eval", "Evaluate trained systems on their held-out folds", tagvalid::cli::cmd_eval},
    {"deflate", "Drive each system toward random-consistent performance", tagvalid::cli::cmd_deflate},
    {"inflate", "Drive each system toward perfect performance", tagvalid::cli::cmd_inflate},
    {"compare", "Make each system significantly beat each other one", tagvalid::cli::cmd_compare},
    {"divergence", "Estimate train/test covariate divergence", tagvalid::cli::cmd_divergence},
    {"report", "Collate all summaries into one table", tagvalid::cli::cmd_report},
    {"all", "Run every stage in order", tagvalid::cli::run_all},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evaluation-validity experiments for Vocals/Non-Vocals autotagging"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  std::vector<std::string> overrides;
  app.add_option("-c,--config", config_path, "Key=value configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "Override one key, e.g. --set folds.k=2 (repeatable)");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print the effective configuration and its hash");

  const Stage* selected = nullptr;
  for (const Stage& stage : kStages) {
    app.add_subcommand(stage.name, stage.help)->callback([&selected, &stage] { selected = &stage; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig() : ExperimentConfig::load(config_path);
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw tagvalid::Error(tagvalid::ErrorKind::kConfig, "--set expects key=value, got '" + kv + "'");
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (print_config) std::cout << cfg.serialize() << "hash=" << cfg.hash() << '\n';
    return selected->run(cfg);
  } catch (const tagvalid::Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.kind()) {
      case tagvalid::ErrorKind::kConfig:
      case tagvalid::ErrorKind::kDependency:
        return tagvalid::cli::kExitConfig;
      default:
        return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
