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

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "tagvalid/covariate.hpp"
#include "tagvalid/dataset.hpp"
#include "tagvalid/error.hpp"
#include "tagvalid/feature_cache.hpp"
#include "tagvalid/hash.hpp"
#include "tagvalid/metrics.hpp"
#include "tagvalid/rng.hpp"
#include "tagvalid/stats.hpp"

namespace tagvalid::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStampPrefix = "#config ";

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"out_dir", "tagvalid-run"},
      {"dataset.manifest", ""},
      {"dataset.vocab", ""},
      {"synth.vocals", "100"},
      {"synth.nonvocals", "50"},
      {"synth.artists", "30"},
      {"synth.duration", "10"},
      {"seed.data", "1"},
      {"folds.k", "3"},
      {"seed.folds", "7"},
      {"systems", "linear_bff,vqmm,srcam"},
      {"seed.train", "42"},
      {"seed.filters", "1000"},
      {"validity.alpha", "0.01"},
      {"validity.f_target", "0.95"},
      {"validity.max_iterations", "50"},
      {"validity.candidates", "1"},
      {"divergence.m", "20000"},
      {"divergence.ensemble", "10"},
      {"divergence.vc_dim", "14"},
      {"divergence.delta", "0.05"},
      {"seed.divergence", "5"},
      {"emit_plot_data", "true"},
      {"write_audio", "false"},
  };
  return d;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kLoad, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

int worse(int a, int b) { return std::max(a, b); }

int exit_for(Termination t) {
  switch (t) {
    case Termination::kSuccess: return kExitSuccess;
    case Termination::kVacuous: return kExitVacuous;
    case Termination::kExhausted: return kExitExhausted;
  }
  return kExitExhausted;
}

VocabularyMap builtin_vocabulary() {
  VocabularyMap v;
  v.vocals = {"male.singing", "female.singing", "singing"};
  v.nonvocals = {"no.singing"};
  return v;
}

// Everything a stage needs to know about the dataset and its folds.
struct Workspace {
  const ExperimentConfig& cfg;
  LabeledDataset data;
  std::optional<FoldAssignment> folds;

  explicit Workspace(const ExperimentConfig& c, bool need_folds = true) : cfg(c) {
    const std::string manifest = cfg.get("dataset.manifest");
    fs::path manifest_path = manifest.empty() ? cfg.out_dir() / "data" / "manifest.tsv" : fs::path(manifest);
    if (!fs::exists(manifest_path)) {
      throw Error(ErrorKind::kDependency, "missing " + manifest_path.string() + "; run the 'synth' stage first");
    }
    const Manifest m = load_manifest(manifest_path);
    const std::string vocab = cfg.get("dataset.vocab");
    data = reduce_vocabulary(m, vocab.empty() ? builtin_vocabulary() : load_vocabulary(vocab));
    if (need_folds) {
      folds = FoldAssignment::parse(read_artifact(cfg, cfg.out_dir() / "folds.csv", "folds"));
      verify_artist_filter(data, *folds);
    }
  }

  bool in_fold(const LabeledRecord& r, std::size_t k) const {
    return folds->fold_of.at(r.record.id) == static_cast<int>(k);
  }

  std::vector<const LabeledRecord*> records(std::size_t k, bool test) const {
    std::vector<const LabeledRecord*> out;
    for (const auto& r : data.records) {
      if (in_fold(r, k) == test) out.push_back(&r);
    }
    return out;
  }
};

AudioClip load_clip(const LabeledRecord& r) {
  AudioClip c = to_canonical_rate(load_wav(r.record.path));
  c.id = r.record.id;
  return c;
}

std::vector<FeatureKind> feature_kinds(const ExperimentConfig& cfg) {
  std::vector<FeatureKind> kinds;
  for (SystemVariant v : cfg.systems()) {
    if (std::find(kinds.begin(), kinds.end(), feature_kind(v)) == kinds.end()) kinds.push_back(feature_kind(v));
  }
  return kinds;
}

FrameSpec covariate_frames() { return FrameSpec{512, 256, Window::kHann}; }

FeatureCache feature_cache(const ExperimentConfig& cfg) { return FeatureCache(cfg.out_dir() / "features"); }
FeatureCache frame_cache(const ExperimentConfig& cfg) { return FeatureCache(cfg.out_dir() / "features" / "frames"); }

void require_features(const ExperimentConfig& cfg) {
  read_artifact(cfg, cfg.out_dir() / "features" / "index.txt", "extract");
}

TrainedSystem load_model(const ExperimentConfig& cfg, SystemVariant v, std::size_t fold) {
  return TrainedSystem::parse(read_artifact(cfg, model_path(cfg, v, fold), "train"));
}

std::uint64_t run_seed(const ExperimentConfig& cfg, std::string_view name) {
  return mix_seed(cfg.get_u64("seed.filters"), fnv1a(name));
}

std::string labels_text(const TestSet& test) {
  std::string out(kLabelsHeader);
  out += '\n';
  for (std::size_t i = 0; i < test.size(); ++i) out += test.ids[i] + ',' + std::string(to_string(test.truths[i])) + '\n';
  return out;
}

std::string region_csv(const OutcomePair& o, double alpha) {
  std::string out = "p_t,x_frac,y_frac_max\n";
  for (const auto& r : illustrative_regions(o.n_t, o.n_f, alpha)) {
    for (std::size_t x = 0; x < r.max_y.size(); ++x) {
      if (r.max_y[x] < 0) continue;
      out += fmt("%.1f", r.p_t) + ',' + fmt("%.17g", o.n_t ? double(x) / o.n_t : 0.0) + ',' +
             fmt("%.17g", o.n_f ? double(r.max_y[x]) / o.n_f : 0.0) + '\n';
    }
  }
  return out;
}

struct TestFold {
  std::vector<AudioClip> clips;
  TestSet set;
};

TestFold load_test_fold(const Workspace& ws, std::size_t k) {
  TestFold t;
  for (const auto* r : ws.records(k, true)) {
    t.clips.push_back(load_clip(*r));
    t.set.ids.push_back(r->record.id);
    t.set.truths.push_back(r->label);
  }
  return t;
}

void write_transformed_audio(const fs::path& dir, const TestFold& fold, const TransformSet& transforms,
                             const FilterbankDesign& design) {
  fs::create_directories(dir);
  for (const auto& clip : fold.clips) {
    const FilterSpec* spec = transforms.find(clip.id);
    write_wav(dir / (clip.id + ".wav"), spec ? apply_filter(clip, *spec, design) : clip);
  }
}

void write_run(const ExperimentConfig& cfg, const ValidityRunLog& log, const std::string& name, const TestFold& fold,
               const FilterbankDesign& design) {
  write_artifact(cfg, run_path(cfg, log.kind, name, ".csv"), log.csv());
  write_artifact(cfg, run_path(cfg, log.kind, name, ".transforms"),
                 "termination " + std::string(to_string(log.termination)) + '\n' + log.transforms.serialize());
  write_artifact(cfg, run_path(cfg, log.kind, name, ".labels.before"), labels_text(fold.set));
  if (cfg.get_bool("emit_plot_data")) {
    write_artifact(cfg, run_path(cfg, log.kind, name, ".plot.csv"), log.plot_csv());
    write_artifact(cfg, run_path(cfg, log.kind, name, ".region.csv"),
                   region_csv(log.iterations.front().outcome, log.criteria.alpha));
  }
  if (cfg.get_bool("write_audio")) {
    write_transformed_audio(run_path(cfg, log.kind, name, "_audio"), fold, log.transforms, design);
  }
}

int refilter_command(const ExperimentConfig& cfg, RunKind kind) {
  Workspace ws(cfg);
  const FilterbankDesign design = design_filterbank();
  const StopCriteria criteria = cfg.criteria();
  std::string summary = "system,fold,termination,iterations,initial_mean_f,final_mean_f,final_p\n";
  int code = kExitSuccess;
  for (std::size_t k = 0; k < cfg.folds(); ++k) {
    const TestFold fold = load_test_fold(ws, k);
    for (SystemVariant v : cfg.systems()) {
      const TrainedSystem sys = load_model(cfg, v, k);
      AudioPredictor predictor({&sys}, fold.clips, design);
      const std::string name = run_name(v, k);
      const ValidityRunLog log = kind == RunKind::kDeflate
                                     ? deflate(predictor, fold.set, criteria, run_seed(cfg, "deflate/" + name))
                                     : inflate(predictor, fold.set, criteria, run_seed(cfg, "inflate/" + name));
      write_run(cfg, log, name, fold, design);
      // Ground truth is never modified by a run; the "after" file is written
      // from the same test set to make that checkable on disk.
      write_artifact(cfg, run_path(cfg, kind, name, ".labels.after"), labels_text(fold.set));
      const auto& first = log.iterations.front();
      const auto& last = log.final_record();
      summary += std::string(to_string(v)) + ',' + std::to_string(k) + ',' + std::string(to_string(log.termination)) +
                 ',' + std::to_string(log.iteration_count()) + ',' + fmt("%.17g", first.fom.mean_tag_f) + ',' +
                 fmt("%.17g", last.fom.mean_tag_f) + ',' + fmt("%.17g", last.p_value) + '\n';
      std::cerr << to_string(kind) << ' ' << name << ": " << to_string(log.termination) << " after "
                << log.iteration_count() << " iterations, mean F " << first.fom.mean_tag_f << " -> "
                << last.fom.mean_tag_f << ", p " << last.p_value << '\n';
      code = worse(code, exit_for(log.termination));
    }
  }
  write_artifact(cfg, run_path(cfg, kind, "summary", ".csv"), summary);
  return code;
}

std::vector<MfccSequence> frames_for(const std::vector<const LabeledRecord*>& records, const FeatureCache& cache) {
  std::vector<MfccSequence> out;
  out.reserve(records.size());
  for (const auto* r : records) {
    auto f = cache.get(r->record.id, 0);
    if (!f || !f->mfcc) {
      throw Error(ErrorKind::kDependency, "no frame features for '" + r->record.id + "'; run the 'extract' stage");
    }
    out.push_back(std::move(*f->mfcc));
  }
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : values_(defaults()) {}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  ExperimentConfig cfg;
  cfg.parse(slurp(path), path.string());
  return cfg;
}

void ExperimentConfig::parse(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kConfig, std::string(origin) + ":" + std::to_string(line_no) + ": expected key=value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!defaults().count(key)) throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorKind::kConfig, "unknown config key '" + key + "'");
  return it->second;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
  const std::string& s = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kConfig, key + " must be a non-negative integer, got '" + s + "'");
  }
  return v;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::kConfig, key + " must be a number, got '" + s + "'");
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string& s = get(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorKind::kConfig, key + " must be true or false, got '" + s + "'");
}

std::vector<SystemVariant> ExperimentConfig::systems() const {
  std::vector<SystemVariant> out;
  std::istringstream in(get("systems"));
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_variant(trim(item)));
  }
  if (out.empty()) throw Error(ErrorKind::kConfig, "no systems configured");
  return out;
}

StopCriteria ExperimentConfig::criteria() const {
  StopCriteria c;
  c.alpha = get_double("validity.alpha");
  c.f_target = get_double("validity.f_target");
  c.max_iterations = get_u64("validity.max_iterations");
  c.candidates = get_u64("validity.candidates");
  c.validate();
  return c;
}

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + '=' + v + '\n';
  return out;
}

std::string ExperimentConfig::hash() const {
  std::string canonical;
  for (const auto& [k, v] : values_) {
    if (k != "out_dir") canonical += k + '=' + v + '\n';
  }
  return hex64(fnv1a(canonical));
}

void write_artifact(const ExperimentConfig& cfg, const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << kStampPrefix << cfg.hash() << '\n' << body;
}

std::string read_artifact(const ExperimentConfig& cfg, const fs::path& path, std::string_view stage) {
  if (!fs::exists(path)) {
    throw Error(ErrorKind::kDependency,
                "missing " + path.string() + "; run the '" + std::string(stage) + "' stage first");
  }
  const std::string text = slurp(path);
  const auto nl = text.find('\n');
  const std::string first = text.substr(0, nl);
  if (!first.starts_with(kStampPrefix)) {
    throw Error(ErrorKind::kConfig, path.string() + " has no config stamp");
  }
  const std::string found = first.substr(kStampPrefix.size());
  if (found != cfg.hash()) {
    throw Error(ErrorKind::kConfig, path.string() + " was produced under config " + found + ", current config is " +
                                        cfg.hash());
  }
  return nl == std::string::npos ? std::string() : text.substr(nl + 1);
}

fs::path model_path(const ExperimentConfig& cfg, SystemVariant v, std::size_t fold) {
  return cfg.out_dir() / "models" / (run_name(v, fold) + ".model");
}

fs::path run_path(const ExperimentConfig& cfg, RunKind kind, const std::string& name, std::string_view suffix) {
  const char* dir = kind == RunKind::kPairwise ? "compare" : (kind == RunKind::kDeflate ? "deflate" : "inflate");
  return cfg.out_dir() / dir / (name + std::string(suffix));
}

std::string run_name(SystemVariant v, std::size_t fold) {
  return std::string(to_string(v)) + "_fold" + std::to_string(fold);
}

std::string pair_name(SystemVariant winner, SystemVariant loser, std::size_t fold) {
  return std::string(to_string(winner)) + "_over_" + std::string(to_string(loser)) + "_fold" + std::to_string(fold);
}

int cmd_synth(const ExperimentConfig& cfg) {
  if (!cfg.get("dataset.manifest").empty()) {
    throw Error(ErrorKind::kConfig, "dataset.manifest is set; synth only generates the synthetic dataset");
  }
  SynthOptions o;
  o.n_vocals = cfg.get_u64("synth.vocals");
  o.n_nonvocals = cfg.get_u64("synth.nonvocals");
  o.n_artists = cfg.get_u64("synth.artists");
  o.duration_s = cfg.get_double("synth.duration");
  o.seed = cfg.get_u64("seed.data");
  if (o.n_vocals == 0 || o.n_nonvocals == 0 || o.n_artists == 0) {
    throw Error(ErrorKind::kConfig, "synthetic counts must be at least 1");
  }
  const Manifest m = synth_generate(o, cfg.out_dir() / "data");
  write_artifact(cfg, cfg.out_dir() / "config.txt", cfg.serialize());
  std::cerr << "synth: wrote " << m.records.size() << " clips\n";
  return kExitSuccess;
}

int cmd_folds(const ExperimentConfig& cfg) {
  Workspace ws(cfg, false);
  for (const auto& w : ws.data.warnings) std::cerr << "warning: " << w << '\n';
  const FoldAssignment fa = make_folds(ws.data, cfg.folds(), cfg.get_u64("seed.folds"));
  for (const auto& w : fa.warnings) std::cerr << "warning: " << w << '\n';
  verify_artist_filter(ws.data, fa);
  write_artifact(cfg, cfg.out_dir() / "folds.csv", fa.serialize());
  write_artifact(cfg, cfg.out_dir() / "labels.csv", serialize_labels(ws.data));
  return kExitSuccess;
}

int cmd_extract(const ExperimentConfig& cfg) {
  Workspace ws(cfg);
  const auto kinds = feature_kinds(cfg);
  FeatureCache cache = feature_cache(cfg);
  FeatureCache frames = frame_cache(cfg);
  std::string index;
  for (const auto& r : ws.data.records) {
    const AudioClip clip = load_clip(r);
    const ClipFeatures f = extract_features(clip, kinds);
    cache.put(r.record.id, 0, f);
    ClipFeatures cov;
    cov.mfcc = mfcc_sequence(clip, covariate_frames());
    frames.put(r.record.id, 0, cov);
    index += r.record.id + ' ' + hex64(fnv1a(serialize_features(f))) + '\n';
  }
  write_artifact(cfg, cfg.out_dir() / "features" / "index.txt", index);
  std::cerr << "extract: " << ws.data.records.size() << " clips\n";
  return kExitSuccess;
}

int cmd_train(const ExperimentConfig& cfg) {
  Workspace ws(cfg);
  require_features(cfg);
  const FeatureCache cache = feature_cache(cfg);
  for (std::size_t k = 0; k < cfg.folds(); ++k) {
    std::vector<TrainingInstance> train;
    for (const auto* r : ws.records(k, false)) {
      auto f = cache.get(r->record.id, 0);
      if (!f) throw Error(ErrorKind::kDependency, "no features for '" + r->record.id + "'; run 'extract'");
      train.push_back({std::move(*f), r->label});
    }
    Provenance prov;
    prov.seed = mix_seed(cfg.get_u64("seed.train"), k);
    for (std::size_t j = 0; j < cfg.folds(); ++j) {
      if (j != k) prov.training_folds.push_back(static_cast<int>(j));
    }
    for (SystemVariant v : cfg.systems()) {
      const TrainedSystem sys = train_system(v, train, prov);
      write_artifact(cfg, model_path(cfg, v, k), sys.serialize());
    }
  }
  return kExitSuccess;
}

int cmd_eval(const ExperimentConfig& cfg) {
  Workspace ws(cfg);
  require_features(cfg);
  const FeatureCache cache = feature_cache(cfg);
  std::string summary = "system,fold,iteration,macroP,macroR,macroF,microP,microR,microF,mean_tag_f\n";
  for (SystemVariant v : cfg.systems()) {
    std::vector<FomReport> reports;
    std::vector<ConfusionCounts> counts;
    for (std::size_t k = 0; k < cfg.folds(); ++k) {
      const TrainedSystem sys = load_model(cfg, v, k);
      std::vector<Label> preds, truths;
      std::string pred_text = "id,truth,prediction\n";
      for (const auto* r : ws.records(k, true)) {
        const auto f = cache.get(r->record.id, 0);
        if (!f) throw Error(ErrorKind::kDependency, "no features for '" + r->record.id + "'; run 'extract'");
        preds.push_back(sys.predict(*f));
        truths.push_back(r->label);
        pred_text += r->record.id + ',' + std::string(to_string(r->label)) + ',' +
                     std::string(to_string(preds.back())) + '\n';
      }
      counts.push_back(confusion(preds, truths));
      reports.push_back(fom(counts.back()));
      const FomReport& rep = reports.back();
      write_artifact(cfg, cfg.out_dir() / "eval" / (run_name(v, k) + ".txt"), rep.serialize());
      write_artifact(cfg, cfg.out_dir() / "eval" / (run_name(v, k) + ".predictions.csv"), pred_text);
      summary += std::string(to_string(v)) + ',' + std::to_string(k) + ",0";
      for (double x : {rep.macro.precision, rep.macro.recall, rep.macro.f, rep.micro.precision, rep.micro.recall,
                       rep.micro.f, rep.mean_tag_f}) {
        summary += ',' + fmt("%.17g", x);
      }
      summary += '\n';
      std::cerr << "eval " << run_name(v, k) << ": mean per-tag F " << rep.mean_tag_f << '\n';
    }
    const CrossFoldReport cross = mirex_cross_fold(reports);
    const FomReport pooled = pooled_fom(counts);
    std::string text;
    text += "average_tag_precision=" + fmt("%.17g", cross.average_tag_precision) + '\n';
    text += "average_tag_recall=" + fmt("%.17g", cross.average_tag_recall) + '\n';
    text += "average_tag_f=" + fmt("%.17g", cross.average_tag_f) + '\n';
    text += "mean_tag_f=" + fmt("%.17g", cross.mean_tag_f) + '\n';
    text += "pooled.micro.precision=" + fmt("%.17g", pooled.micro.precision) + '\n';
    text += "pooled.micro.recall=" + fmt("%.17g", pooled.micro.recall) + '\n';
    text += "pooled.mean_tag_f=" + fmt("%.17g", pooled.mean_tag_f) + '\n';
    write_artifact(cfg, cfg.out_dir() / "eval" / (std::string(to_string(v)) + "_crossfold.txt"), text);
  }
  write_artifact(cfg, cfg.out_dir() / "eval" / "summary.csv", summary);
  return kExitSuccess;
}

int cmd_deflate(const ExperimentConfig& cfg) { return refilter_command(cfg, RunKind::kDeflate); }
int cmd_inflate(const ExperimentConfig& cfg) { return refilter_command(cfg, RunKind::kInflate); }

int cmd_compare(const ExperimentConfig& cfg) {
  Workspace ws(cfg);
  const FilterbankDesign design = design_filterbank();
  const StopCriteria criteria = cfg.criteria();
  const auto systems = cfg.systems();
  if (systems.size() < 2) throw Error(ErrorKind::kConfig, "compare needs at least two systems");
  std::string summary = "winner,loser,fold,termination,iterations,a12,a21,p_value\n";
  int code = kExitSuccess;
  for (std::size_t k = 0; k < cfg.folds(); ++k) {
    const TestFold fold = load_test_fold(ws, k);
    std::vector<TrainedSystem> models;
    for (SystemVariant v : systems) models.push_back(load_model(cfg, v, k));
    for (std::size_t a = 0; a < systems.size(); ++a) {
      for (std::size_t b = 0; b < systems.size(); ++b) {
        if (a == b) continue;
        AudioPredictor predictor({&models[a], &models[b]}, fold.clips, design);
        const std::string name = pair_name(systems[a], systems[b], k);
        const ValidityRunLog log = pairwise_dominate(predictor, fold.set, criteria, run_seed(cfg, "compare/" + name));
        write_run(cfg, log, name, fold, design);
        const auto& last = log.final_record();
        summary += std::string(to_string(systems[a])) + ',' + std::string(to_string(systems[b])) + ',' +
                   std::to_string(k) + ',' + std::string(to_string(log.termination)) + ',' +
                   std::to_string(log.iteration_count()) + ',' + std::to_string(last.a12) + ',' +
                   std::to_string(last.a21) + ',' + fmt("%.17g", last.p_value) + '\n';
        std::cerr << "compare " << name << ": " << to_string(log.termination) << " after " << log.iteration_count()
                  << " iterations, a12=" << last.a12 << " a21=" << last.a21 << " p=" << last.p_value << '\n';
        code = worse(code, exit_for(log.termination));
      }
    }
  }
  write_artifact(cfg, run_path(cfg, RunKind::kPairwise, "summary", ".csv"), summary);
  return code;
}

int cmd_divergence(const ExperimentConfig& cfg) {
  Workspace ws(cfg);
  require_features(cfg);
  const FeatureCache frames = frame_cache(cfg);
  const FilterbankDesign design = design_filterbank();
  const std::size_t m = cfg.get_u64("divergence.m");
  const std::size_t vc = cfg.get_u64("divergence.vc_dim");
  const double delta = cfg.get_double("divergence.delta");
  EnsembleOptions ens;
  ens.members = cfg.get_u64("divergence.ensemble");
  std::string summary = "fold,column,d_hat,best_error,additive_term,bound\n";

  for (std::size_t k = 0; k < cfg.folds(); ++k) {
    const auto train_records = ws.records(k, false);
    const auto test_records = ws.records(k, true);
    const auto train_frames = frames_for(train_records, frames);
    const std::uint64_t seed = mix_seed(cfg.get_u64("seed.divergence"), k);
    const FrameSample u = sample_frames(train_frames, m, mix_seed(seed, 1), 0);

    std::string text;
    auto column = [&](const std::string& label, const std::vector<MfccSequence>& test_frames) {
      const FrameSample v = sample_frames(test_frames, m, mix_seed(seed, 2), 1);
      const DivergenceReport rep = make_report(label, empirical_divergence(u, v, mix_seed(seed, 3), ens), m, vc, delta);
      text += rep.serialize();
      summary += std::to_string(k) + ',' + label + ',' + fmt("%.17g", rep.estimate.d_hat) + ',' +
                 fmt("%.17g", rep.estimate.best_error) + ',' + fmt("%.17g", rep.additive_term) + ',' +
                 fmt("%.17g", rep.bound) + '\n';
      std::cerr << "divergence fold " << k << ' ' << label << ": d_hat " << rep.estimate.d_hat << ", bound "
                << rep.bound << '\n';
    };
    column("untransformed", frames_for(test_records, frames));

    for (RunKind kind : {RunKind::kDeflate, RunKind::kInflate}) {
      for (SystemVariant sv : cfg.systems()) {
        const fs::path tpath = run_path(cfg, kind, run_name(sv, k), ".transforms");
        if (!fs::exists(tpath)) continue;
        std::string body = read_artifact(cfg, tpath, to_string(kind));
        body = body.substr(body.find('\n') + 1);
        const TransformSet transforms = TransformSet::parse(body);
        std::vector<MfccSequence> test_frames;
        for (const auto* r : test_records) {
          const AudioClip clip = load_clip(*r);
          const FilterSpec* spec = transforms.find(r->record.id);
          test_frames.push_back(mfcc_sequence(spec ? apply_filter(clip, *spec, design) : clip, covariate_frames()));
        }
        column(std::string(to_string(kind)) + "." + std::string(to_string(sv)), test_frames);
      }
    }
    write_artifact(cfg, cfg.out_dir() / "divergence" / ("fold" + std::to_string(k) + ".txt"), text);
  }
  write_artifact(cfg, cfg.out_dir() / "divergence" / "summary.csv", summary);
  return kExitSuccess;
}

int cmd_report(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto table = [&](const std::string& title, const fs::path& path, std::string_view stage) {
    out << "== " << title << " ==\n";
    if (!fs::exists(path)) {
      out << "(not run: " << stage << ")\n\n";
      return;
    }
    std::istringstream in(read_artifact(cfg, path, stage));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
      std::vector<std::string> cells;
      std::istringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end != cell.c_str() && *end == '\0' && cell.find('.') != std::string::npos) cell = fmt("%.4g", v);
        cells.push_back(cell);
      }
      rows.push_back(std::move(cells));
    }
    std::vector<std::size_t> width;
    for (const auto& r : rows) {
      width.resize(std::max(width.size(), r.size()), 0);
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        out << r[c] << std::string(width[c] - r[c].size() + 2, ' ');
      }
      out << '\n';
    }
    out << '\n';
  };
  const fs::path dir = cfg.out_dir();
  table("Figures of merit per system and fold", dir / "eval" / "summary.csv", "eval");
  table("Deflation", dir / "deflate" / "summary.csv", "deflate");
  table("Inflation", dir / "inflate" / "summary.csv", "inflate");
  table("Pairwise dominance", dir / "compare" / "summary.csv", "compare");
  table("Train/test divergence", dir / "divergence" / "summary.csv", "divergence");
  write_artifact(cfg, dir / "report" / "summary.txt", out.str());
  std::cout << out.str();
  return kExitSuccess;
}

int run_all(const ExperimentConfig& cfg) {
  int code = kExitSuccess;
  if (cfg.get("dataset.manifest").empty()) code = worse(code, cmd_synth(cfg));
  code = worse(code, cmd_folds(cfg));
  code = worse(code, cmd_extract(cfg));
  code = worse(code, cmd_train(cfg));
  code = worse(code, cmd_eval(cfg));
  code = worse(code, cmd_deflate(cfg));
  code = worse(code, cmd_inflate(cfg));
  code = worse(code, cmd_compare(cfg));
  code = worse(code, cmd_divergence(cfg));
  code = worse(code, cmd_report(cfg));
  return code;
}

}  // namespace tagvalid::cli
