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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "tagvalid/system.hpp"
#include "tagvalid/validity.hpp"

namespace tagvalid::cli {

enum ExitCode : int {
  kExitSuccess = 0,
  kExitVacuous = 2,
  kExitExhausted = 3,
  kExitConfig = 4,
};

// Flat key=value configuration. Unknown keys are rejected so typos cannot
// silently fall back to defaults.
class ExperimentConfig {
 public:
  ExperimentConfig();

  static ExperimentConfig load(const std::filesystem::path& path);
  void parse(std::string_view text, std::string_view origin);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;

  std::filesystem::path out_dir() const { return get("out_dir"); }
  std::vector<SystemVariant> systems() const;
  std::size_t folds() const { return get_u64("folds.k"); }
  StopCriteria criteria() const;

  // Hash of every key except out_dir; stamped on each artifact.
  std::string hash() const;
  std::string serialize() const;

 private:
  std::map<std::string, std::string> values_;
};

// Artifact I/O: every file starts with "#config <hash>". Reading checks the
// stamp and names the producing stage when the file is missing.
void write_artifact(const ExperimentConfig& cfg, const std::filesystem::path& path, const std::string& body);
std::string read_artifact(const ExperimentConfig& cfg, const std::filesystem::path& path, std::string_view stage);

// Each command returns an ExitCode.
int cmd_synth(const ExperimentConfig& cfg);
int cmd_folds(const ExperimentConfig& cfg);
int cmd_extract(const ExperimentConfig& cfg);
int cmd_train(const ExperimentConfig& cfg);
int cmd_eval(const ExperimentConfig& cfg);
int cmd_deflate(const ExperimentConfig& cfg);
int cmd_inflate(const ExperimentConfig& cfg);
int cmd_compare(const ExperimentConfig& cfg);
int cmd_divergence(const ExperimentConfig& cfg);
int cmd_report(const ExperimentConfig& cfg);

// synth (or nothing for a manifest dataset), folds, extract, train, eval,
// deflate, inflate, compare, divergence, report. Returns the largest exit code.
int run_all(const ExperimentConfig& cfg);

// Paths shared with tests.
std::filesystem::path model_path(const ExperimentConfig& cfg, SystemVariant v, std::size_t fold);
std::filesystem::path run_path(const ExperimentConfig& cfg, RunKind kind, const std::string& name,
                               std::string_view suffix);
std::string run_name(SystemVariant v, std::size_t fold);
std::string pair_name(SystemVariant winner, SystemVariant loser, std::size_t fold);

}  // namespace tagvalid::cli
