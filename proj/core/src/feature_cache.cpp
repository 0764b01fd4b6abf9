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

#include "tagvalid/feature_cache.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "tagvalid/error.hpp"
#include "tagvalid/hash.hpp"

namespace tagvalid {
namespace {

void put_values(std::string& out, const double* v, std::size_t n) {
  char buf[40];
  for (std::size_t i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof buf, " %a", v[i]);
    out += buf;
  }
  out += '\n';
}

double read_double(std::istringstream& in) {
  std::string w;
  if (!(in >> w)) throw Error(ErrorKind::kFormat, "feature record ended early");
  char* end = nullptr;
  const double v = std::strtod(w.c_str(), &end);
  if (end == w.c_str()) throw Error(ErrorKind::kFormat, "bad value '" + w + "' in feature record");
  return v;
}

std::size_t read_size(std::istringstream& in) {
  std::size_t v = 0;
  if (!(in >> v)) throw Error(ErrorKind::kFormat, "bad count in feature record");
  return v;
}

}  // namespace

std::uint64_t transform_hash(const FilterSpec* spec) {
  if (spec == nullptr) return 0;
  const std::uint64_t h = fnv1a(spec->serialize());
  return h == 0 ? 1 : h;
}

std::string serialize_features(const ClipFeatures& f) {
  std::string body;
  if (f.bff) {
    body += "bff " + std::to_string(kBffDims);
    put_values(body, f.bff->values.data(), kBffDims);
  }
  if (f.mfcc) {
    body += "mfcc " + std::to_string(f.mfcc->frames.size()) + ' ' + std::to_string(f.mfcc->spec.frame_len) + ' ' +
            std::to_string(f.mfcc->spec.hop) + '\n';
    for (const auto& frame : f.mfcc->frames) {
      body += 'm';
      put_values(body, frame.data(), kMfccCoeffs);
    }
  }
  if (f.am) {
    body += "am " + std::to_string(kAmDims);
    put_values(body, f.am->values.data(), kAmDims);
  }
  return std::string(kFeatureHeader) + "\ncontent " + hex64(fnv1a(body)) + '\n' + body;
}

ClipFeatures parse_features(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::getline(in, line);
  if (line != kFeatureHeader) throw Error(ErrorKind::kFormat, "not a feature record (bad header)");
  std::string key, digest;
  in >> key >> digest;
  if (key != "content") throw Error(ErrorKind::kFormat, "feature record without content hash");
  in.get();
  const std::string body(text.substr(static_cast<std::size_t>(in.tellg())));
  if (hex64(fnv1a(body)) != digest) throw Error(ErrorKind::kFormat, "feature record content hash mismatch");

  ClipFeatures f;
  std::istringstream b(body);
  std::string tag;
  while (b >> tag) {
    if (tag == "bff") {
      if (read_size(b) != kBffDims) throw Error(ErrorKind::kFormat, "bff dimension");
      BffVector v;
      for (auto& x : v.values) x = read_double(b);
      f.bff = v;
    } else if (tag == "mfcc") {
      MfccSequence s;
      const std::size_t frames = read_size(b);
      s.spec.frame_len = read_size(b);
      s.spec.hop = read_size(b);
      s.spec.window = Window::kHann;
      s.frames.resize(frames);
      for (auto& fr : s.frames) {
        std::string m;
        b >> m;
        if (m != "m") throw Error(ErrorKind::kFormat, "mfcc frame marker");
        for (auto& x : fr) x = read_double(b);
      }
      f.mfcc = std::move(s);
    } else if (tag == "am") {
      if (read_size(b) != kAmDims) throw Error(ErrorKind::kFormat, "am dimension");
      AmVector v;
      for (auto& x : v.values) x = read_double(b);
      f.am = v;
    } else {
      throw Error(ErrorKind::kFormat, "unknown feature block '" + tag + "'");
    }
  }
  return f;
}

FeatureCache::FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path FeatureCache::path_for(const std::string& id, std::uint64_t transform) const {
  return dir_ / (id + "." + hex64(transform) + ".feat");
}

std::optional<ClipFeatures> FeatureCache::get(const std::string& id, std::uint64_t transform) const {
  {
    std::shared_lock lock(mutex_);
    if (const auto it = memory_.find({id, transform}); it != memory_.end()) return it->second;
  }
  const auto path = path_for(id, transform);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  ClipFeatures f = parse_features(ss.str());
  std::unique_lock lock(mutex_);
  memory_.emplace(std::pair(id, transform), f);
  return f;
}

void FeatureCache::put(const std::string& id, std::uint64_t transform, const ClipFeatures& features) {
  const std::string text = serialize_features(features);
  std::unique_lock lock(mutex_);
  const auto path = path_for(id, transform);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorKind::kIo, "cannot write " + tmp);
    out << text;
  }
  std::filesystem::rename(tmp, path);
  memory_[{id, transform}] = features;
}

}  // namespace tagvalid
