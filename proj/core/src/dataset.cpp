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

#include "tagvalid/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  auto lines = split(text, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
  }
  return lines;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kLoad, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

}  // namespace

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir, bool check_files) {
  const auto lines = lines_of(text);
  if (lines.empty() || !lines[0].starts_with(kManifestHeader)) {
    throw Error(ErrorKind::kLoad, at_line(1) + "missing header '" + std::string(kManifestHeader) + "'");
  }
  Manifest m;
  m.name = std::string(trim(lines[0].substr(kManifestHeader.size())));
  std::map<std::string, std::size_t> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    const auto cols = split(lines[i], '\t');
    if (cols.size() != 4) {
      throw Error(ErrorKind::kLoad, at_line(line_no) + "expected 4 tab-separated columns, found " +
                                        std::to_string(cols.size()));
    }
    ManifestRecord r;
    r.id = std::string(trim(cols[0]));
    r.artist = std::string(trim(cols[2]));
    if (r.id.empty()) throw Error(ErrorKind::kLoad, at_line(line_no) + "empty instance id");
    if (r.artist.empty()) throw Error(ErrorKind::kLoad, at_line(line_no) + "empty artist id");
    if (const auto it = seen.find(r.id); it != seen.end()) {
      throw Error(ErrorKind::kLoad, "duplicate id '" + r.id + "' on lines " + std::to_string(it->second) + " and " +
                                        std::to_string(line_no));
    }
    seen.emplace(r.id, line_no);
    const std::filesystem::path p(std::string(trim(cols[1])));
    r.path = p.is_absolute() ? p : base_dir / p;
    if (check_files && !std::filesystem::exists(r.path)) {
      throw Error(ErrorKind::kLoad, at_line(line_no) + "missing audio file " + r.path.string());
    }
    for (auto tag : split(cols[3], ';')) {
      tag = trim(tag);
      if (!tag.empty()) r.tags.emplace_back(tag);
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_text(path), path.parent_path(), true);
}

std::string Manifest::serialize(const std::filesystem::path& relative_to) const {
  std::string out(kManifestHeader);
  if (!name.empty()) out += " " + name;
  out += '\n';
  for (const auto& r : records) {
    const std::filesystem::path p = relative_to.empty() ? r.path : r.path.lexically_relative(relative_to);
    out += r.id + '\t' + p.generic_string() + '\t' + r.artist + '\t';
    for (std::size_t i = 0; i < r.tags.size(); ++i) out += (i ? ";" : "") + r.tags[i];
    out += '\n';
  }
  return out;
}

void VocabularyMap::validate() const {
  std::set<std::string> v;
  for (const auto& t : vocals) v.insert(lower(t));
  for (const auto& t : nonvocals) {
    if (v.count(lower(t))) throw Error(ErrorKind::kConfig, "tag '" + t + "' is in both vocabulary lists");
  }
}

std::string VocabularyMap::serialize() const {
  std::string out(kVocabularyHeader);
  out += "\nunmatched=";
  out += unmatched == UnmatchedPolicy::kDrop ? "drop" : "nonvocals";
  out += "\n[vocals]\n";
  for (const auto& t : vocals) out += t + '\n';
  out += "[nonvocals]\n";
  for (const auto& t : nonvocals) out += t + '\n';
  return out;
}

VocabularyMap parse_vocabulary(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || !lines[0].starts_with(kVocabularyHeader)) {
    throw Error(ErrorKind::kLoad, at_line(1) + "missing header '" + std::string(kVocabularyHeader) + "'");
  }
  VocabularyMap vmap;
  std::vector<std::string>* section = nullptr;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::string_view l = lines[i];
    if (const auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    l = trim(l);
    if (l.empty()) continue;
    if (l == "[vocals]") {
      section = &vmap.vocals;
    } else if (l == "[nonvocals]") {
      section = &vmap.nonvocals;
    } else if (l.starts_with("unmatched=") && section == nullptr) {
      const auto v = trim(l.substr(10));
      if (v == "drop") vmap.unmatched = UnmatchedPolicy::kDrop;
      else if (v == "nonvocals") vmap.unmatched = UnmatchedPolicy::kNonVocals;
      else throw Error(ErrorKind::kLoad, at_line(i + 1) + "unknown unmatched policy '" + std::string(v) + "'");
    } else if (section == nullptr) {
      throw Error(ErrorKind::kLoad, at_line(i + 1) + "tag outside a [vocals] or [nonvocals] section");
    } else {
      section->emplace_back(l);
    }
  }
  vmap.validate();
  return vmap;
}

VocabularyMap load_vocabulary(const std::filesystem::path& path) { return parse_vocabulary(read_text(path)); }

LabeledDataset reduce_vocabulary(const Manifest& manifest, const VocabularyMap& vmap) {
  vmap.validate();
  std::set<std::string> vocals, nonvocals;
  for (const auto& t : vmap.vocals) vocals.insert(lower(t));
  for (const auto& t : vmap.nonvocals) nonvocals.insert(lower(t));

  LabeledDataset out;
  out.name = manifest.name;
  for (const auto& r : manifest.records) {
    bool v = false, nv = false;
    for (const auto& t : r.tags) {
      const std::string key = lower(t);
      v = v || vocals.count(key);
      nv = nv || nonvocals.count(key);
    }
    if (v && nv) {
      out.warnings.push_back("dropped '" + r.id + "': tags match both Vocals and Non-Vocals");
    } else if (v) {
      out.records.push_back({r, Label::kVocals});
    } else if (nv || vmap.unmatched == UnmatchedPolicy::kNonVocals) {
      out.records.push_back({r, Label::kNonVocals});
    } else {
      out.warnings.push_back("dropped '" + r.id + "': no tag in the vocabulary");
    }
  }
  return out;
}

Manifest LabeledDataset::manifest() const {
  Manifest m;
  m.name = name;
  for (const auto& r : records) m.records.push_back(r.record);
  return m;
}

std::string serialize_labels(const LabeledDataset& data) {
  std::string out(kLabelsHeader);
  out += '\n';
  for (const auto& r : data.records) out += r.record.id + ',' + std::string(to_string(r.label)) + '\n';
  return out;
}

std::vector<std::string> FoldAssignment::ids_in(int fold) const {
  std::vector<std::string> out;
  for (const auto& [id, f] : fold_of) {
    if (f == fold) out.push_back(id);
  }
  return out;
}

std::string FoldAssignment::serialize() const {
  std::string out(kFoldsHeader);
  out += " k=" + std::to_string(k) + "\nid,fold\n";
  for (const auto& [id, f] : fold_of) out += id + ',' + std::to_string(f) + '\n';
  return out;
}

FoldAssignment FoldAssignment::parse(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || !lines[0].starts_with(kFoldsHeader)) {
    throw Error(ErrorKind::kLoad, at_line(1) + "missing header '" + std::string(kFoldsHeader) + "'");
  }
  FoldAssignment fa;
  const auto kpos = lines[0].find("k=");
  if (kpos == std::string_view::npos) throw Error(ErrorKind::kLoad, at_line(1) + "missing k=");
  fa.k = std::stoul(std::string(lines[0].substr(kpos + 2)));
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto cols = split(lines[i], ',');
    if (cols.size() != 2) throw Error(ErrorKind::kLoad, at_line(i + 1) + "expected 'id,fold'");
    const int f = std::stoi(std::string(cols[1]));
    if (f < 0 || static_cast<std::size_t>(f) >= fa.k) {
      throw Error(ErrorKind::kLoad, at_line(i + 1) + "fold index out of range");
    }
    fa.fold_of.emplace(std::string(cols[0]), f);
  }
  return fa;
}

FoldAssignment make_folds(const LabeledDataset& data, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::kFold, "need at least 2 folds");
  struct Artist {
    std::string id;
    std::vector<const LabeledRecord*> records;
    std::size_t vocals = 0;
  };
  std::map<std::string, Artist> by_id;
  for (const auto& r : data.records) {
    auto& a = by_id[r.record.artist];
    a.id = r.record.artist;
    a.records.push_back(&r);
    a.vocals += r.label == Label::kVocals;
  }
  if (by_id.size() < k) {
    throw Error(ErrorKind::kFold, std::to_string(by_id.size()) + " artists cannot fill " + std::to_string(k) +
                                      " folds");
  }
  std::vector<Artist*> artists;
  for (auto& [id, a] : by_id) artists.push_back(&a);
  Rng rng(seed);
  rng.shuffle(std::span<Artist*>(artists));
  std::stable_sort(artists.begin(), artists.end(),
                   [](const Artist* a, const Artist* b) { return a->records.size() > b->records.size(); });

  FoldAssignment fa;
  fa.k = k;
  std::vector<std::size_t> count(k, 0), vocals(k, 0);
  for (const Artist* a : artists) {
    std::size_t best = 0;
    for (std::size_t f = 1; f < k; ++f) {
      if (std::pair(count[f], vocals[f]) < std::pair(count[best], vocals[best])) best = f;
    }
    count[best] += a->records.size();
    vocals[best] += a->vocals;
    for (const auto* r : a->records) fa.fold_of[r->record.id] = static_cast<int>(best);
  }

  const double n = static_cast<double>(data.records.size());
  const double total_vocals = static_cast<double>(std::accumulate(vocals.begin(), vocals.end(), std::size_t{0}));
  const double ratio = n > 0 ? total_vocals / n : 0.0;
  for (std::size_t f = 0; f < k; ++f) {
    if (static_cast<double>(count[f]) > 1.5 * n / static_cast<double>(k)) {
      fa.warnings.push_back("fold " + std::to_string(f) + " holds " + std::to_string(count[f]) + " of " +
                            std::to_string(data.records.size()) + " instances; one artist dominates");
    }
    const double r = count[f] ? static_cast<double>(vocals[f]) / static_cast<double>(count[f]) : 0.0;
    if (count[f] && std::abs(r - ratio) > 0.2 * ratio) {
      fa.warnings.push_back("fold " + std::to_string(f) + " Vocals ratio " + std::to_string(r) +
                            " is more than 20% away from the global " + std::to_string(ratio));
    }
  }
  return fa;
}

void verify_artist_filter(const LabeledDataset& data, const FoldAssignment& folds) {
  std::map<std::string, int> artist_fold;
  for (const auto& r : data.records) {
    const auto it = folds.fold_of.find(r.record.id);
    if (it == folds.fold_of.end()) throw Error(ErrorKind::kFold, "instance '" + r.record.id + "' has no fold");
    const auto [pos, inserted] = artist_fold.emplace(r.record.artist, it->second);
    if (!inserted && pos->second != it->second) {
      throw Error(ErrorKind::kFold, "artist '" + r.record.artist + "' appears in folds " +
                                        std::to_string(pos->second) + " and " + std::to_string(it->second));
    }
  }
}

}  // namespace tagvalid
