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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tagvalid/audio.hpp"
#include "tagvalid/spectrum.hpp"

namespace tagvalid {

inline constexpr std::size_t kLowLevelDims = 17;
inline constexpr std::size_t kBffDims = 4 * kLowLevelDims;  // 68
inline constexpr std::size_t kMfccCoeffs = 13;
inline constexpr std::size_t kMfccMelBands = 40;
inline constexpr std::size_t kAmBands = 32;
inline constexpr std::size_t kAmModulationBins = 24;
inline constexpr std::size_t kAmDims = kAmBands * kAmModulationBins;  // 768
inline constexpr double kTextureWindowSeconds = 30.0;
inline constexpr double kAmSegmentSeconds = 27.7;
inline constexpr double kAmMinModHz = 0.25;
inline constexpr double kAmMaxModHz = 16.0;
inline constexpr double kRolloffFraction = 0.85;

using LowLevelVector = std::array<double, kLowLevelDims>;
using MfccFrame = std::array<double, kMfccCoeffs>;

// [mean of window means | mean of window stds | std of window means | std of window stds],
// each block ordered [zcr, centroid, rolloff, flux, mfcc1..mfcc13].
struct BffVector {
  std::array<double, kBffDims> values{};
};

// Coefficients 1..13 per frame; coefficient 0 is excluded.
struct MfccSequence {
  FrameSpec spec;
  std::vector<MfccFrame> frames;
};

// Band-major: values[band * kAmModulationBins + modulation_bin].
struct AmVector {
  std::array<double, kAmDims> values{};
};

// Computes MFCCs 1..13 from a one-sided power spectrum: 40 HTK mel bands over
// [0, rate/2], natural log with a floor, orthonormal DCT-II.
class MfccComputer {
 public:
  MfccComputer(std::size_t frame_len, int sample_rate);
  void compute(std::span<const double> power, std::span<double> out) const;

 private:
  MelFilterbank mel_;
  Dct2 dct_;
};

// Per-frame [zcr, centroid, rolloff(0.85), flux, mfcc1..mfcc13] for 23.2 ms frames.
class LowLevelExtractor {
 public:
  explicit LowLevelExtractor(std::size_t frame_len = 512, int sample_rate = kCanonicalSampleRate);

  // `frame` is the raw (unwindowed) frame, used for the zero crossing rate;
  // `power` is its windowed power spectrum; `prev_power` is empty for the
  // first frame, which gets flux 0. Silent spectra give centroid = rolloff = 0.
  LowLevelVector compute(std::span<const double> frame, std::span<const double> power,
                         std::span<const double> prev_power) const;

 private:
  std::size_t frame_len_;
  int sample_rate_;
  MfccComputer mfcc_;
};

LowLevelVector low_level_frame_features(std::span<const double> frame, std::span<const double> power,
                                        std::span<const double> prev_power);

// Low-level features for every 512-sample, 50%-overlap frame of a clip.
std::vector<LowLevelVector> low_level_sequence(const AudioClip& clip);

BffVector bff(const AudioClip& clip);

// 93 ms frames (2048 samples), 50% overlap.
MfccSequence mfcc_sequence(const AudioClip& clip);
// MFCCs 1..13 with an arbitrary frame spec; 23.2 ms frames are used for the
// covariate-shift frame samples.
MfccSequence mfcc_sequence(const AudioClip& clip, const FrameSpec& spec);

AmVector am_features(const AudioClip& clip);

// Which front-ends a classifier needs.
enum class FeatureKind { kBff, kMfcc, kAm };

struct ClipFeatures {
  std::optional<BffVector> bff;
  std::optional<MfccSequence> mfcc;
  std::optional<AmVector> am;
};

ClipFeatures extract_features(const AudioClip& clip, std::span<const FeatureKind> kinds);

}  // namespace tagvalid
