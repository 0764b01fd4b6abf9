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
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>

#include "tagvalid/features.hpp"
#include "tagvalid/transform.hpp"

namespace tagvalid {

inline constexpr std::string_view kFeatureHeader = "#tagvalid-features v1";

// 0 for the identity transform, otherwise a hash of the serialized spec.
std::uint64_t transform_hash(const FilterSpec* spec);

// Text record holding whichever feature kinds are present, with values in
// hex floating point so reloads are exact.
std::string serialize_features(const ClipFeatures& features);
ClipFeatures parse_features(std::string_view text);

// On-disk store of one record per (instance id, transform hash). Each file
// carries a header and a content hash that is checked on read. Lookups may
// run concurrently; stores are exclusive.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path dir);

  std::optional<ClipFeatures> get(const std::string& id, std::uint64_t transform) const;
  void put(const std::string& id, std::uint64_t transform, const ClipFeatures& features);

  std::filesystem::path path_for(const std::string& id, std::uint64_t transform) const;

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::pair<std::string, std::uint64_t>, ClipFeatures> memory_;
};

}  // namespace tagvalid
