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

#include "tagvalid/system.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

constexpr std::string_view kModelHeader = "tagvalid-model v1";

void put(std::ostringstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, " %a", v);
  out << buf;
}

template <typename Range>
void put_row(std::ostringstream& out, std::string_view key, const Range& values) {
  out << key << ' ' << std::size(values);
  for (double v : values) put(out, v);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : in_(std::string(text)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) throw Error(ErrorKind::kFormat, "model file ended early");
    return w;
  }
  void expect(std::string_view key) {
    const std::string w = word();
    if (w != key) throw Error(ErrorKind::kFormat, "expected '" + std::string(key) + "', found '" + w + "'");
  }
  std::uint64_t integer() { return std::stoull(word()); }
  double real() {
    const std::string w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end == w.c_str()) throw Error(ErrorKind::kFormat, "bad number '" + w + "'");
    return v;
  }
  std::vector<double> row(std::string_view key) {
    expect(key);
    const std::size_t n = integer();
    std::vector<double> v(n);
    for (auto& x : v) x = real();
    return v;
  }
  template <std::size_t N>
  void row_into(std::string_view key, std::array<double, N>& out) {
    const auto v = row(key);
    if (v.size() != N) throw Error(ErrorKind::kFormat, std::string(key) + " has wrong length");
    std::copy(v.begin(), v.end(), out.begin());
  }
  std::string line() {
    std::string l;
    std::getline(in_ >> std::ws, l);
    return l;
  }

 private:
  std::istringstream in_;
};

void write_markov(std::ostringstream& out, std::string_view name, const MarkovModel& m) {
  out << "markov " << name << ' ' << m.symbols;
  put(out, m.smoothing);
  out << '\n';
  put_row(out, "log_initial", m.log_initial);
  put_row(out, "log_transition", m.log_transition);
}

MarkovModel read_markov(Reader& in, std::string_view name) {
  in.expect("markov");
  in.expect(name);
  MarkovModel m;
  m.symbols = in.integer();
  m.smoothing = in.real();
  m.log_initial = in.row("log_initial");
  m.log_transition = in.row("log_transition");
  if (m.log_initial.size() != m.symbols || m.log_transition.size() != m.symbols * m.symbols) {
    throw Error(ErrorKind::kFormat, "markov model shape");
  }
  return m;
}

void write_matrix(std::ostringstream& out, std::string_view key, const Eigen::MatrixXd& m) {
  out << key << ' ' << m.rows() << ' ' << m.cols();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) put(out, m(i, j));
  }
  out << '\n';
}

Eigen::MatrixXd read_matrix(Reader& in, std::string_view key) {
  in.expect(key);
  const auto rows = static_cast<Eigen::Index>(in.integer());
  const auto cols = static_cast<Eigen::Index>(in.integer());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = in.real();
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

std::string_view to_string(SystemVariant variant) {
  switch (variant) {
    case SystemVariant::kLinearBff: return "linear_bff";
    case SystemVariant::kVqmm: return "vqmm";
    case SystemVariant::kSrcam: return "srcam";
  }
  return "unknown";
}

SystemVariant parse_variant(std::string_view text) {
  for (SystemVariant v : kAllVariants) {
    if (to_string(v) == text) return v;
  }
  throw Error(ErrorKind::kConfig, "unknown system variant '" + std::string(text) + "'");
}

FeatureKind feature_kind(SystemVariant variant) {
  switch (variant) {
    case SystemVariant::kLinearBff: return FeatureKind::kBff;
    case SystemVariant::kVqmm: return FeatureKind::kMfcc;
    case SystemVariant::kSrcam: return FeatureKind::kAm;
  }
  return FeatureKind::kBff;
}

TrainedSystem::TrainedSystem(SystemVariant variant, Model model, Provenance provenance)
    : variant_(variant), model_(std::move(model)), provenance_(std::move(provenance)) {
  const bool matches = (variant == SystemVariant::kLinearBff && std::holds_alternative<LinearBffModel>(model_)) ||
                       (variant == SystemVariant::kVqmm && std::holds_alternative<VqmmModel>(model_)) ||
                       (variant == SystemVariant::kSrcam && std::holds_alternative<SrcamModel>(model_));
  if (!matches) throw Error(ErrorKind::kShape, "model does not match variant");
}

Label TrainedSystem::predict(const ClipFeatures& features) const {
  switch (variant_) {
    case SystemVariant::kLinearBff: {
      if (!features.bff) throw Error(ErrorKind::kShape, "linear_bff needs BFF features");
      return predict_linear(std::get<LinearBffModel>(model_), *features.bff);
    }
    case SystemVariant::kVqmm: {
      if (!features.mfcc) throw Error(ErrorKind::kShape, "vqmm needs MFCC features");
      const auto& m = std::get<VqmmModel>(model_);
      return score_vqmm(m.vocals, m.nonvocals, encode(m.codebook, *features.mfcc)).label;
    }
    case SystemVariant::kSrcam: {
      if (!features.am) throw Error(ErrorKind::kShape, "srcam needs AM features");
      const auto& m = std::get<SrcamModel>(model_);
      return predict_srcam(m.dictionary, *features.am, m.lambda, m.bpdn).decision.label;
    }
  }
  return kTieLabel;
}

Label TrainedSystem::predict(const AudioClip& clip) const {
  const FeatureKind kind = required_feature();
  return predict(extract_features(clip, std::span<const FeatureKind>(&kind, 1)));
}

std::string TrainedSystem::serialize() const {
  std::ostringstream out;
  out << kModelHeader << '\n';
  out << "variant " << to_string(variant_) << '\n';
  out << "seed " << provenance_.seed << '\n';
  out << "folds " << provenance_.training_folds.size();
  for (int f : provenance_.training_folds) out << ' ' << f;
  out << '\n';
  switch (variant_) {
    case SystemVariant::kLinearBff: {
      const auto& m = std::get<LinearBffModel>(model_);
      out << "model_seed " << m.seed << '\n';
      put_row(out, "weights", m.weights);
      put_row(out, "min", m.min);
      put_row(out, "max", m.max);
      break;
    }
    case SystemVariant::kVqmm: {
      const auto& m = std::get<VqmmModel>(model_);
      out << "codebook " << m.codebook.size() << ' ' << m.codebook.seed << '\n';
      for (const auto& c : m.codebook.centroids) put_row(out, "centroid", c);
      write_markov(out, "vocals", m.vocals);
      write_markov(out, "nonvocals", m.nonvocals);
      break;
    }
    case SystemVariant::kSrcam: {
      const auto& m = std::get<SrcamModel>(model_);
      out << "lambda";
      put(out, m.lambda);
      out << "\nbpdn";
      put(out, m.bpdn.epsilon_sq);
      out << ' ' << m.bpdn.max_iters << ' ' << m.bpdn.max_bisections;
      put(out, m.bpdn.min_penalty_ratio);
      out << '\n';
      write_matrix(out, "atoms", m.dictionary.atoms);
      write_matrix(out, "tag_atoms", m.dictionary.tag_atoms);
      put_row(out, "min", std::vector<double>(m.dictionary.min.begin(), m.dictionary.min.end()));
      put_row(out, "max", std::vector<double>(m.dictionary.max.begin(), m.dictionary.max.end()));
      break;
    }
  }
  out << "end\n";
  return out.str();
}

TrainedSystem TrainedSystem::parse(std::string_view text) {
  Reader in(text);
  if (in.line() != kModelHeader) throw Error(ErrorKind::kFormat, "not a tagvalid model (bad header)");
  in.expect("variant");
  const SystemVariant variant = parse_variant(in.word());
  Provenance prov;
  in.expect("seed");
  prov.seed = in.integer();
  in.expect("folds");
  const std::size_t n_folds = in.integer();
  for (std::size_t i = 0; i < n_folds; ++i) prov.training_folds.push_back(static_cast<int>(in.integer()));

  switch (variant) {
    case SystemVariant::kLinearBff: {
      LinearBffModel m;
      in.expect("model_seed");
      m.seed = in.integer();
      in.row_into("weights", m.weights);
      in.row_into("min", m.min);
      in.row_into("max", m.max);
      in.expect("end");
      return TrainedSystem(variant, m, prov);
    }
    case SystemVariant::kVqmm: {
      VqmmModel m;
      in.expect("codebook");
      const std::size_t k = in.integer();
      m.codebook.seed = in.integer();
      m.codebook.centroids.resize(k);
      for (auto& c : m.codebook.centroids) in.row_into("centroid", c);
      m.vocals = read_markov(in, "vocals");
      m.nonvocals = read_markov(in, "nonvocals");
      in.expect("end");
      return TrainedSystem(variant, std::move(m), prov);
    }
    case SystemVariant::kSrcam: {
      SrcamModel m;
      in.expect("lambda");
      m.lambda = in.real();
      in.expect("bpdn");
      m.bpdn.epsilon_sq = in.real();
      m.bpdn.max_iters = in.integer();
      m.bpdn.max_bisections = in.integer();
      m.bpdn.min_penalty_ratio = in.real();
      m.dictionary.atoms = read_matrix(in, "atoms");
      m.dictionary.tag_atoms = read_matrix(in, "tag_atoms");
      m.dictionary.min = to_vector(in.row("min"));
      m.dictionary.max = to_vector(in.row("max"));
      in.expect("end");
      m.dictionary.prepare();
      return TrainedSystem(variant, std::move(m), prov);
    }
  }
  throw Error(ErrorKind::kFormat, "unreachable variant");
}

TrainedSystem train_system(SystemVariant variant, std::span<const TrainingInstance> train,
                           const Provenance& provenance, const TrainingOptions& options) {
  switch (variant) {
    case SystemVariant::kLinearBff: {
      std::vector<LabeledBff> data;
      data.reserve(train.size());
      for (const auto& t : train) {
        if (!t.features.bff) throw Error(ErrorKind::kShape, "missing BFF features");
        data.push_back({*t.features.bff, t.label});
      }
      return TrainedSystem(variant, train_linear_bff(data, provenance.seed, options.linear), provenance);
    }
    case SystemVariant::kVqmm: {
      std::vector<MfccFrame> frames;
      for (const auto& t : train) {
        if (!t.features.mfcc) throw Error(ErrorKind::kShape, "missing MFCC features");
        frames.insert(frames.end(), t.features.mfcc->frames.begin(), t.features.mfcc->frames.end());
      }
      VqmmModel m;
      m.codebook = train_codebook(frames, options.codebook_size, provenance.seed, options.kmeans).codebook;
      std::vector<CodeSequence> vocals, nonvocals;
      for (const auto& t : train) {
        (t.label == Label::kVocals ? vocals : nonvocals).push_back(encode(m.codebook, *t.features.mfcc));
      }
      if (vocals.empty() || nonvocals.empty()) {
        throw Error(ErrorKind::kDegenerateTraining, "vqmm training set must contain both labels");
      }
      m.vocals = train_markov(vocals, m.codebook.size(), options.markov_smoothing);
      m.nonvocals = train_markov(nonvocals, m.codebook.size(), options.markov_smoothing);
      return TrainedSystem(variant, std::move(m), provenance);
    }
    case SystemVariant::kSrcam: {
      std::vector<LabeledAm> data;
      data.reserve(train.size());
      for (const auto& t : train) {
        if (!t.features.am) throw Error(ErrorKind::kShape, "missing AM features");
        data.push_back({*t.features.am, t.label});
      }
      SrcamModel m;
      m.dictionary = build_dictionary(data);
      m.lambda = options.src_lambda;
      m.bpdn = options.bpdn;
      return TrainedSystem(variant, std::move(m), provenance);
    }
  }
  throw Error(ErrorKind::kConfig, "unreachable variant");
}

}  // namespace tagvalid
