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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tagvalid/audio.hpp"

namespace tagvalid {

inline constexpr std::size_t kDefaultChannels = 96;
inline constexpr std::size_t kDefaultTapsPerChannel = 64;
inline constexpr double kMaxAttenuationDb = 20.0;
// Reported for exact reconstruction, where the ratio is zero.
inline constexpr double kErrorFloorDb = -300.0;

// Cosine-modulated, non-decimated filterbank. Channel k is the prototype
// lowpass shifted to (k + 1/2) * pi / channels. The prototype is a windowed
// sinc with zeros at every nonzero multiple of 2 * channels, so the channel
// responses sum to a pure delay.
struct FilterbankDesign {
  std::size_t channels = kDefaultChannels;
  std::size_t taps_per_channel = kDefaultTapsPerChannel;
  std::vector<double> prototype;  // odd length, centered

  std::size_t length() const { return prototype.size(); }
  std::size_t delay() const { return prototype.size() / 2; }
  // Center frequency of a channel in Hz.
  double center_hz(std::size_t channel, int sample_rate) const;
  std::vector<double> channel_response(std::size_t channel) const;
};

FilterbankDesign design_filterbank(std::size_t channels = kDefaultChannels,
                                   std::size_t taps_per_channel = kDefaultTapsPerChannel);

// Per-channel linear gains in [0.1, 1], plus the seed that drew them.
struct FilterSpec {
  std::vector<double> gains;
  std::uint64_t seed = 0;
  // Every channel was attenuated, so no gain equals 1.
  bool uniform_attenuation = false;

  static FilterSpec unity(std::size_t channels = kDefaultChannels);
  static FilterSpec uniform(double gain, std::size_t channels = kDefaultChannels);

  // "seed g_0 ... g_{n-1}" with 6 significant digits per gain.
  std::string serialize() const;
  // Regenerates the FilterSpec from its seed and checks it against the listed gains.
  static FilterSpec parse(const std::string& line);
};

// Draws a nonempty random subset of channels (each with probability 1/2,
// redrawn if empty) and attenuates each selected channel by an independent
// uniform amount in (0, 20] dB.
FilterSpec sample_irrelevant_filter(std::uint64_t seed, std::size_t channels = kDefaultChannels);

// Composite impulse response sum_k gain_k * h_k for a spec, reusable across
// clips. Filtering is linear, time-invariant and delay compensated.
class FilterKernel {
 public:
  FilterKernel(const FilterSpec& spec, const FilterbankDesign& design);

  const std::vector<double>& impulse_response() const { return taps_; }
  std::vector<double> apply(std::span<const double> samples) const;

 private:
  std::vector<double> taps_;
  std::size_t delay_;
  // Frequency response cached for the most recent FFT size.
  mutable std::size_t cached_nfft_ = 0;
  mutable std::vector<double> cached_response_;  // interleaved re/im
};

AudioClip apply_filter(const AudioClip& clip, const FilterSpec& spec, const FilterbankDesign& design);

// Explicit analysis into delay-compensated full-rate subband signals, and
// the weighted synthesis sum. apply_filter is equal to synthesize(analyze).
std::vector<std::vector<double>> analyze(std::span<const double> samples, const FilterbankDesign& design);
std::vector<double> synthesize(const std::vector<std::vector<double>>& subbands,
                               std::span<const double> gains);

// 10*log10(mean((x - y)^2) / mean(x^2)); floored at kErrorFloorDb.
double error_db(std::span<const double> reference, std::span<const double> estimate);
// Unity-gain round trip error of the design on a clip.
double reconstruction_error_db(const AudioClip& clip, const FilterbankDesign& design);

// Instance id -> at most one filter. Filters are replaced, never composed.
class TransformSet {
 public:
  TransformSet() = default;
  explicit TransformSet(std::span<const std::string> ids);

  void assign(const std::string& id, const FilterSpec& spec);
  void reset(const std::string& id);
  // nullptr for identity.
  const FilterSpec* find(const std::string& id) const;
  bool contains(const std::string& id) const { return entries_.count(id) != 0; }
  std::size_t size() const { return entries_.size(); }
  std::size_t transformed_count() const;
  const std::map<std::string, std::optional<FilterSpec>>& entries() const { return entries_; }

  // One line per instance: "id\tidentity" or "id\t<FilterSpec::serialize()>".
  std::string serialize() const;
  static TransformSet parse(const std::string& text);

 private:
  std::map<std::string, std::optional<FilterSpec>> entries_;
};

}  // namespace tagvalid
