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

#include "pipeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "tagvalid/error.hpp"
#include "tagvalid/metrics.hpp"

namespace tagvalid::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kData;
}

TEST(Config, ParseOverridesAndRejectsUnknownKeys) {
  ExperimentConfig cfg;
  cfg.parse("folds.k = 2  # two folds\n\nsystems=vqmm,srcam\n", "inline");
  EXPECT_EQ(cfg.folds(), 2u);
  EXPECT_EQ(cfg.systems().size(), 2u);
  EXPECT_EQ(kind_of([&] { cfg.parse("fold.k=2\n", "inline"); }), ErrorKind::kConfig);
  EXPECT_EQ(kind_of([&] { cfg.parse("just words\n", "inline"); }), ErrorKind::kConfig);
  cfg.set("validity.alpha", "abc");
  EXPECT_EQ(kind_of([&] { cfg.criteria(); }), ErrorKind::kConfig);
  cfg.set("validity.alpha", "0.01");
  cfg.set("folds.k", "-1");
  EXPECT_EQ(kind_of([&] { cfg.folds(); }), ErrorKind::kConfig);
}

TEST(Config, HashIgnoresOutputDirectoryOnly) {
  ExperimentConfig a, b;
  b.set("out_dir", "/somewhere/else");
  EXPECT_EQ(a.hash(), b.hash());
  b.set("seed.filters", "1001");
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Artifacts, StampsAreCheckedAndMissingFilesNameTheStage) {
  const fs::path dir = fs::temp_directory_path() / "tagvalid_artifact_test";
  fs::remove_all(dir);
  ExperimentConfig a;
  a.set("out_dir", dir.string());
  write_artifact(a, dir / "x.txt", "body\n");
  EXPECT_EQ(slurp(dir / "x.txt"), "#config " + a.hash() + "\nbody\n");
  EXPECT_EQ(read_artifact(a, dir / "x.txt", "s"), "body\n");

  ExperimentConfig b = a;
  b.set("seed.train", "43");
  EXPECT_EQ(kind_of([&] { read_artifact(b, dir / "x.txt", "s"); }), ErrorKind::kConfig);
  try {
    read_artifact(a, dir / "missing.txt", "train");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kDependency);
    EXPECT_NE(std::string(e.what()).find("'train'"), std::string::npos);
  }
  EXPECT_EQ(kind_of([&] { cmd_train(a); }), ErrorKind::kDependency);
  fs::remove_all(dir);
}

class SmallPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / "tagvalid_small_pipeline";
    fs::remove_all(dir_);
    cfg_.set("out_dir", dir_.string());
    cfg_.set("synth.vocals", "12");
    cfg_.set("synth.nonvocals", "8");
    cfg_.set("synth.artists", "6");
    cfg_.set("synth.duration", "3");
    cfg_.set("folds.k", "2");
    cfg_.set("systems", "linear_bff,vqmm");
    cfg_.set("validity.max_iterations", "3");
    cfg_.set("divergence.m", "2000");
    for (auto* stage : {cmd_synth, cmd_folds, cmd_extract, cmd_train, cmd_eval}) ASSERT_EQ(stage(cfg_), kExitSuccess);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static inline fs::path dir_;
  static inline ExperimentConfig cfg_;
};

TEST_F(SmallPipeline, EvalMatchesLibraryMetrics) {
  for (SystemVariant v : cfg_.systems()) {
    for (std::size_t k = 0; k < 2; ++k) {
      std::istringstream in(read_artifact(cfg_, dir_ / "eval" / (run_name(v, k) + ".predictions.csv"), "eval"));
      std::string line;
      std::getline(in, line);
      std::vector<Label> preds, truths;
      while (std::getline(in, line)) {
        const auto a = line.find(','), b = line.rfind(',');
        truths.push_back(line.substr(a + 1, b - a - 1) == "Vocals" ? Label::kVocals : Label::kNonVocals);
        preds.push_back(line.substr(b + 1) == "Vocals" ? Label::kVocals : Label::kNonVocals);
      }
      ASSERT_FALSE(preds.empty());
      EXPECT_EQ(read_artifact(cfg_, dir_ / "eval" / (run_name(v, k) + ".txt"), "eval"),
                fom(confusion(preds, truths)).serialize());
    }
  }
}

TEST_F(SmallPipeline, EvalIsIdempotent) {
  const std::string before = slurp(dir_ / "eval" / "summary.csv");
  const std::string model = slurp(model_path(cfg_, SystemVariant::kVqmm, 0));
  ASSERT_EQ(cmd_train(cfg_), kExitSuccess);
  ASSERT_EQ(cmd_eval(cfg_), kExitSuccess);
  EXPECT_EQ(slurp(dir_ / "eval" / "summary.csv"), before);
  EXPECT_EQ(slurp(model_path(cfg_, SystemVariant::kVqmm, 0)), model);
}

TEST_F(SmallPipeline, DeflateWritesLogsAndEncodesTermination) {
  const int code = cmd_deflate(cfg_);
  EXPECT_TRUE(code == kExitSuccess || code == kExitVacuous || code == kExitExhausted) << code;
  std::istringstream summary(read_artifact(cfg_, run_path(cfg_, RunKind::kDeflate, "summary", ".csv"), "deflate"));
  std::string line;
  std::getline(summary, line);
  int worst = kExitSuccess;
  std::size_t rows = 0;
  while (std::getline(summary, line)) {
    ++rows;
    std::istringstream ls(line);
    std::string system, fold, termination, iterations;
    std::getline(ls, system, ',');
    std::getline(ls, fold, ',');
    std::getline(ls, termination, ',');
    std::getline(ls, iterations, ',');
    if (termination == "vacuous") worst = std::max(worst, int{kExitVacuous});
    if (termination == "exhausted") worst = std::max(worst, int{kExitExhausted});
    const std::string name = system + "_fold" + fold;
    const std::string plot = read_artifact(cfg_, run_path(cfg_, RunKind::kDeflate, name, ".plot.csv"), "deflate");
    EXPECT_EQ(static_cast<std::size_t>(std::count(plot.begin(), plot.end(), '\n')), std::stoul(iterations) + 2)
        << name;
    EXPECT_EQ(slurp(run_path(cfg_, RunKind::kDeflate, name, ".labels.before")),
              slurp(run_path(cfg_, RunKind::kDeflate, name, ".labels.after")));
  }
  EXPECT_EQ(rows, 4u);
  EXPECT_EQ(code, worst);
}

TEST_F(SmallPipeline, DivergenceReportsTermSeparately) {
  ASSERT_EQ(cmd_divergence(cfg_), kExitSuccess);
  const std::string text = read_artifact(cfg_, dir_ / "divergence" / "fold0.txt", "divergence");
  EXPECT_NE(text.find("untransformed.d_hat="), std::string::npos);
  EXPECT_NE(text.find("untransformed.additive_term="), std::string::npos);
  ASSERT_EQ(cmd_report(cfg_), kExitSuccess);
  EXPECT_TRUE(fs::exists(dir_ / "report" / "summary.txt"));
}

TEST_F(SmallPipeline, SynthRefusesManifestDatasets) {
  ExperimentConfig c = cfg_;
  c.set("dataset.manifest", (dir_ / "data" / "manifest.tsv").string());
  EXPECT_EQ(kind_of([&] { cmd_synth(c); }), ErrorKind::kConfig);
}

}  // namespace
}  // namespace tagvalid::cli
