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

#include "tagvalid/features.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

#include "tagvalid/error.hpp"
#include "tagvalid/feature_cache.hpp"
#include "tagvalid/rng.hpp"
#include "tagvalid/spectrum.hpp"

namespace tagvalid {
namespace {

AudioClip noise_clip(double seconds, std::uint64_t seed, double amp = 0.3) {
  Rng rng(seed);
  AudioClip clip{"noise", std::vector<double>(static_cast<std::size_t>(seconds * kCanonicalSampleRate))};
  for (double& v : clip.samples) v = amp * rng.uniform(-1.0, 1.0);
  return clip;
}

AudioClip tone_clip(double hz, double seconds, double amp = 0.5) {
  AudioClip clip{"tone", std::vector<double>(static_cast<std::size_t>(seconds * kCanonicalSampleRate))};
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = amp * std::sin(2 * std::numbers::pi * hz * i / kCanonicalSampleRate);
  }
  return clip;
}

TEST(LowLevel, ConstantFrameHasNoCrossings) {
  const std::vector<double> frame(512, 0.25);
  const auto power = power_spectrum(frame);
  const auto v = low_level_frame_features(frame, power, {});
  EXPECT_EQ(v[0], 0.0);
  EXPECT_EQ(v[3], 0.0);
}

TEST(LowLevel, PointMassCentroidAndRolloff) {
  const std::vector<double> frame(512, 0.0);
  std::vector<double> power(257, 0.0);
  power[40] = 3.0;
  const auto v = low_level_frame_features(frame, power, {});
  const double bin_hz = kCanonicalSampleRate / 512.0;
  EXPECT_NEAR(v[1], 40 * bin_hz, 1e-9);
  EXPECT_NEAR(v[2], 40 * bin_hz, 1e-9);
}

TEST(LowLevel, SilentFrameConventions) {
  const std::vector<double> frame(512, 0.0);
  const std::vector<double> power(257, 0.0);
  const auto v = low_level_frame_features(frame, power, power);
  EXPECT_EQ(v[1], 0.0);
  EXPECT_EQ(v[2], 0.0);
  EXPECT_EQ(v[3], 0.0);
  for (double x : v) EXPECT_TRUE(std::isfinite(x));
}

TEST(LowLevel, FluxOfIdenticalSpectraIsZero) {
  Rng rng(1);
  std::vector<double> frame(512);
  for (double& x : frame) x = rng.normal();
  const auto power = power_spectrum(frame);
  EXPECT_EQ(low_level_frame_features(frame, power, power)[3], 0.0);
  std::vector<double> other(power);
  other[10] += 1.0;
  EXPECT_GT(low_level_frame_features(frame, power, other)[3], 0.0);
}

TEST(LowLevel, AlternatingSignCrossesEverySample) {
  std::vector<double> frame(512);
  for (std::size_t i = 0; i < frame.size(); ++i) frame[i] = i % 2 ? -0.5 : 0.5;
  EXPECT_NEAR(low_level_frame_features(frame, power_spectrum(frame), {})[0], 1.0, 1e-12);
}

TEST(Bff, ShapeDeterminismAndStationarity) {
  const AudioClip clip = noise_clip(10.0, 2);
  const BffVector a = bff(clip);
  const BffVector b = bff(clip);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.size(), 68u);
  for (double v : a.values) EXPECT_TRUE(std::isfinite(v));
  // Clip-level spread of the window statistics is negligible for stationary noise.
  for (std::size_t k = 0; k < 2 * kLowLevelDims; ++k) {
    const double mean = a.values[k];
    const double spread = a.values[2 * kLowLevelDims + k];
    EXPECT_LE(spread, 0.05 * std::abs(mean) + 1e-12) << k;
  }
}

TEST(Bff, MeansOfMeansStableAcrossDuration) {
  const AudioClip shorter = noise_clip(61.0, 3);
  const AudioClip longer = noise_clip(95.0, 4);
  const BffVector a = bff(shorter);
  const BffVector b = bff(longer);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(a.values[k] / b.values[k], 1.0, 0.05) << k;
  }
}

TEST(Bff, TooShortClip) {
  const AudioClip clip{"tiny", std::vector<double>(600, 0.1)};
  try {
    bff(clip);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kTooShort);
  }
}

TEST(Mfcc, FrameCountForThirtySeconds) {
  const AudioClip clip = noise_clip(30.0, 5);
  const MfccSequence seq = mfcc_sequence(clip);
  EXPECT_EQ(seq.spec.frame_len, 2048u);
  EXPECT_EQ(seq.spec.hop, 1024u);
  EXPECT_EQ(seq.frames.size(), 644u);
}

TEST(Mfcc, GlobalGainInvariance) {
  const AudioClip clip = noise_clip(5.0, 6);
  AudioClip half = clip;
  for (double& v : half.samples) v *= 0.5;
  const auto a = mfcc_sequence(clip);
  const auto b = mfcc_sequence(half);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t f = 0; f < a.frames.size(); ++f) {
    for (std::size_t c = 0; c < kMfccCoeffs; ++c) ASSERT_NEAR(a.frames[f][c], b.frames[f][c], 1e-6);
  }
}

TEST(Mfcc, PureToneIsStationary) {
  // 1076.66 Hz completes a whole number of cycles per hop, so every frame is identical.
  const double hz = kCanonicalSampleRate / 1024.0 * 50.0;
  const auto seq = mfcc_sequence(tone_clip(hz, 3.0));
  for (const auto& frame : seq.frames) {
    for (std::size_t c = 0; c < kMfccCoeffs; ++c) ASSERT_NEAR(frame[c], seq.frames[0][c], 1e-6);
  }
}

TEST(Am, SilenceIsZero) {
  const AudioClip clip{"silence", std::vector<double>(3 * kCanonicalSampleRate, 0.0)};
  const AmVector v = am_features(clip);
  EXPECT_EQ(v.values.size(), 768u);
  for (double x : v.values) EXPECT_EQ(x, 0.0);
}

TEST(Am, FourHertzModulationPeaksInItsBin) {
  AudioClip clip = tone_clip(1000.0, 10.0, 0.4);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] *= 1.0 + 0.8 * std::sin(2 * std::numbers::pi * 4.0 * i / kCanonicalSampleRate);
  }
  const AmVector v = am_features(clip);
  for (double x : v.values) ASSERT_GE(x, 0.0);

  std::size_t band = 0;
  double band_energy = -1.0;
  for (std::size_t b = 0; b < kAmBands; ++b) {
    double e = 0.0;
    for (std::size_t m = 0; m < kAmModulationBins; ++m) e += v.values[b * kAmModulationBins + m];
    if (e > band_energy) {
      band_energy = e;
      band = b;
    }
  }
  const double* row = v.values.data() + band * kAmModulationBins;
  const auto peak = static_cast<std::size_t>(std::max_element(row, row + kAmModulationBins) - row);
  const double ratio = kAmMaxModHz / kAmMinModHz;
  const double lo = kAmMinModHz * std::pow(ratio, static_cast<double>(peak) / kAmModulationBins);
  const double hi = kAmMinModHz * std::pow(ratio, static_cast<double>(peak + 1) / kAmModulationBins);
  EXPECT_LE(lo, 4.0 + 1e-9);
  EXPECT_GE(hi, 4.0 - 1e-9);
  for (std::size_t m = 0; m < kAmModulationBins; ++m) {
    if (m + 1 < peak || m > peak + 1) {
      EXPECT_LT(row[m], 0.2 * row[peak]) << m;
    }
  }
}

TEST(Am, ShortClipStillHasFixedShape) {
  const AmVector v = am_features(noise_clip(2.0, 7));
  EXPECT_EQ(v.values.size(), kAmDims);
  for (double x : v.values) {
    EXPECT_TRUE(std::isfinite(x));
    EXPECT_GE(x, 0.0);
  }
}

TEST(Extract, MatchesIndividualExtractors) {
  const AudioClip clip = noise_clip(4.0, 8);
  const FeatureKind kinds[] = {FeatureKind::kBff, FeatureKind::kMfcc, FeatureKind::kAm};
  const ClipFeatures f = extract_features(clip, kinds);
  ASSERT_TRUE(f.bff && f.mfcc && f.am);
  EXPECT_EQ(f.bff->values, bff(clip).values);
  EXPECT_EQ(f.am->values, am_features(clip).values);
  EXPECT_EQ(f.mfcc->frames, mfcc_sequence(clip).frames);
  const FeatureKind only_bff[] = {FeatureKind::kBff};
  const ClipFeatures g = extract_features(clip, only_bff);
  EXPECT_TRUE(g.bff);
  EXPECT_FALSE(g.mfcc);
  EXPECT_FALSE(g.am);
}

TEST(FeatureText, RoundTripIsExact) {
  const AudioClip clip = noise_clip(3.0, 9);
  const FeatureKind kinds[] = {FeatureKind::kBff, FeatureKind::kMfcc, FeatureKind::kAm};
  const ClipFeatures f = extract_features(clip, kinds);
  const ClipFeatures g = parse_features(serialize_features(f));
  EXPECT_EQ(f.bff->values, g.bff->values);
  EXPECT_EQ(f.am->values, g.am->values);
  EXPECT_EQ(f.mfcc->frames, g.mfcc->frames);
  EXPECT_EQ(f.mfcc->spec.hop, g.mfcc->spec.hop);
}

TEST(FeatureCacheTest, StoreReloadAndCorruption) {
  const auto dir = std::filesystem::temp_directory_path() / "tagvalid_feature_cache_test";
  std::filesystem::remove_all(dir);
  const AudioClip clip = noise_clip(3.0, 10);
  const FeatureKind kinds[] = {FeatureKind::kBff};
  const ClipFeatures f = extract_features(clip, kinds);
  const FilterSpec spec = sample_irrelevant_filter(3);
  EXPECT_EQ(transform_hash(nullptr), 0u);
  EXPECT_NE(transform_hash(&spec), 0u);
  {
    FeatureCache cache(dir);
    EXPECT_FALSE(cache.get("a", 0));
    cache.put("a", transform_hash(&spec), f);
  }
  {
    FeatureCache fresh(dir);
    const auto got = fresh.get("a", transform_hash(&spec));
    ASSERT_TRUE(got);
    EXPECT_EQ(got->bff->values, f.bff->values);
    EXPECT_FALSE(fresh.get("a", 0));
  }
  {
    const auto path = FeatureCache(dir).path_for("a", transform_hash(&spec));
    std::ofstream(path, std::ios::app) << "garbage\n";
    FeatureCache corrupted(dir);
    EXPECT_THROW(corrupted.get("a", transform_hash(&spec)), Error);
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace tagvalid
