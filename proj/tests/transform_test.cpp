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

#include "tagvalid/transform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = amp * rng.uniform(-1.0, 1.0);
  return x;
}

std::vector<double> tone(double hz, std::size_t n, double amp = 0.5) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * std::numbers::pi * hz * i / kCanonicalSampleRate);
  return x;
}

double rms(std::span<const double> x, std::size_t skip = 0) {
  double s = 0.0;
  for (std::size_t i = skip; i < x.size() - skip; ++i) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

const FilterbankDesign& design() {
  static const FilterbankDesign d = design_filterbank();
  return d;
}

TEST(Filterbank, UnityReconstructionOnWhiteNoise) {
  const AudioClip clip{"noise", white_noise(5 * kCanonicalSampleRate, 11)};
  EXPECT_LE(reconstruction_error_db(clip, design()), -60.0);
}

TEST(Filterbank, TwoBandDesignReconstructs) {
  const AudioClip clip{"noise", white_noise(kCanonicalSampleRate, 12)};
  EXPECT_LE(reconstruction_error_db(clip, design_filterbank(2, 64)), -60.0);
}

TEST(Filterbank, ExplicitAnalysisSynthesisMatchesKernel) {
  const auto x = white_noise(4000, 13);
  const FilterSpec spec = sample_irrelevant_filter(99);
  const auto bands = analyze(x, design());
  ASSERT_EQ(bands.size(), kDefaultChannels);
  const auto y1 = synthesize(bands, spec.gains);
  const auto y2 = FilterKernel(spec, design()).apply(x);
  ASSERT_EQ(y1.size(), x.size());
  ASSERT_EQ(y2.size(), x.size());
  EXPECT_LE(error_db(y1, y2), -120.0);
}

TEST(Filterbank, UnityResynthesisOfToneIsSampleAccurate) {
  const auto x = tone(1000.0, 8192);
  const auto y = FilterKernel(FilterSpec::unity(), design()).apply(x);
  for (std::size_t i = 0; i < x.size(); ++i) ASSERT_NEAR(y[i], x[i], 1e-3 * 0.5);
}

TEST(Filterbank, ChannelsTileTheSpectrum) {
  const auto& d = design();
  for (std::size_t k = 1; k < d.channels; ++k) {
    EXPECT_GT(d.center_hz(k, kCanonicalSampleRate), d.center_hz(k - 1, kCanonicalSampleRate));
  }
  EXPECT_NEAR(d.center_hz(0, kCanonicalSampleRate), kCanonicalSampleRate / 4.0 / d.channels, 1e-9);
}

TEST(FilterKernel, UniformGainScales) {
  const auto x = white_noise(20000, 14);
  for (double g : {0.1, 0.5}) {
    const auto y = FilterKernel(FilterSpec::uniform(g), design()).apply(x);
    std::vector<double> gx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) gx[i] = g * x[i];
    EXPECT_LE(error_db(gx, y), -60.0);
    EXPECT_NEAR(rms(y) / rms(x), g, 1e-3 * g);
  }
}

TEST(FilterKernel, SingleChannelAttenuationOnTone) {
  const auto& d = design();
  std::size_t ch = 0;
  for (std::size_t k = 0; k < d.channels; ++k) {
    if (std::abs(d.center_hz(k, kCanonicalSampleRate) - 1000.0) <
        std::abs(d.center_hz(ch, kCanonicalSampleRate) - 1000.0)) {
      ch = k;
    }
  }
  FilterSpec spec = FilterSpec::unity();
  spec.gains[ch] = 0.1;
  const double hz = d.center_hz(ch, kCanonicalSampleRate);
  const auto x = tone(hz, 3 * kCanonicalSampleRate);
  const auto y = FilterKernel(spec, d).apply(x);
  const std::size_t skip = d.length();
  EXPECT_NEAR(rms(y, skip) / rms(x, skip), 0.1, 0.01);
}

// Linearity and time invariance as randomized properties.
TEST(FilterKernelProperty, Linear) {
  Rng rng(15);
  for (int trial = 0; trial < 5; ++trial) {
    const FilterKernel k(sample_irrelevant_filter(rng.next()), design());
    const auto a = white_noise(6000, rng.next());
    const auto b = white_noise(6000, rng.next());
    const double alpha = rng.uniform(-2.0, 2.0), beta = rng.uniform(-2.0, 2.0);
    std::vector<double> mix(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
    const auto ya = k.apply(a), yb = k.apply(b), ym = k.apply(mix);
    std::vector<double> expect(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) expect[i] = alpha * ya[i] + beta * yb[i];
    EXPECT_LE(error_db(expect, ym), -60.0);
  }
}

TEST(FilterKernelProperty, TimeInvariant) {
  Rng rng(16);
  for (int trial = 0; trial < 5; ++trial) {
    const FilterKernel k(sample_irrelevant_filter(rng.next()), design());
    const std::size_t shift = 1 + rng.below(500);
    auto x = white_noise(8000, rng.next());
    std::fill(x.begin(), x.begin() + 2000, 0.0);
    std::fill(x.end() - 2000, x.end(), 0.0);
    std::vector<double> shifted(x.size(), 0.0);
    std::copy(x.begin(), x.end() - shift, shifted.begin() + shift);
    const auto y = k.apply(x), ys = k.apply(shifted);
    std::vector<double> expect(x.size(), 0.0);
    std::copy(y.begin(), y.end() - shift, expect.begin() + shift);
    EXPECT_LE(error_db(expect, ys), -60.0);
  }
}

TEST(ErrorDb, ClosedForms) {
  const auto x = white_noise(1000, 17);
  EXPECT_EQ(error_db(x, x), kErrorFloorDb);
  std::vector<double> y(x);
  for (double& v : y) v *= 0.999;
  EXPECT_NEAR(error_db(x, y), -60.0, 1e-6);
}

TEST(SampleFilter, BoundsAndDeterminism) {
  for (std::uint64_t s = 0; s < 300; ++s) {
    const FilterSpec a = sample_irrelevant_filter(s);
    const FilterSpec b = sample_irrelevant_filter(s);
    ASSERT_EQ(a.gains, b.gains);
    ASSERT_EQ(a.gains.size(), kDefaultChannels);
    double mx = 0.0;
    bool attenuated = false;
    for (double g : a.gains) {
      ASSERT_GE(g, 0.1);
      ASSERT_LE(g, 1.0);
      mx = std::max(mx, g);
      attenuated |= g < 1.0;
    }
    EXPECT_TRUE(attenuated);
    EXPECT_TRUE(mx == 1.0 || a.uniform_attenuation);
  }
}

TEST(SampleFilter, EveryChannelEventuallySelected) {
  std::vector<bool> seen(kDefaultChannels, false);
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const FilterSpec f = sample_irrelevant_filter(s + 1000000);
    for (std::size_t k = 0; k < f.gains.size(); ++k) seen[k] = seen[k] || f.gains[k] < 1.0;
  }
  for (std::size_t k = 0; k < seen.size(); ++k) EXPECT_TRUE(seen[k]) << k;
}

TEST(SampleFilter, SelectionRateIsAboutHalf) {
  std::size_t selected = 0, total = 0;
  for (std::uint64_t s = 0; s < 2000; ++s) {
    for (double g : sample_irrelevant_filter(s).gains) {
      selected += g < 1.0;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(selected) / total, 0.5, 0.01);
}

TEST(FilterSpecText, RoundTrip) {
  const FilterSpec a = sample_irrelevant_filter(1234);
  const FilterSpec b = FilterSpec::parse(a.serialize());
  EXPECT_EQ(a.seed, b.seed);
  EXPECT_EQ(a.gains, b.gains);
}

TEST(FilterSpecText, TamperedGainsAreRejected) {
  std::string line = sample_irrelevant_filter(5).serialize();
  const auto pos = line.find(' ');
  line = line.substr(0, pos) + " 0.5" + line.substr(line.find(' ', pos + 1));
  EXPECT_THROW(FilterSpec::parse(line), Error);
}

TEST(TransformSetTest, ReplacementNeverComposes) {
  const std::vector<std::string> ids = {"a", "b", "c"};
  TransformSet t(ids);
  EXPECT_EQ(t.size(), 3u);
  EXPECT_EQ(t.transformed_count(), 0u);
  EXPECT_EQ(t.find("a"), nullptr);
  const FilterSpec f1 = sample_irrelevant_filter(1), f2 = sample_irrelevant_filter(2);
  t.assign("a", f1);
  t.assign("a", f2);
  ASSERT_NE(t.find("a"), nullptr);
  EXPECT_EQ(t.find("a")->seed, f2.seed);
  EXPECT_EQ(t.transformed_count(), 1u);
  t.reset("a");
  EXPECT_EQ(t.find("a"), nullptr);
}

TEST(TransformSetTest, UnknownIdIsAnError) {
  const std::vector<std::string> ids = {"a"};
  TransformSet t(ids);
  EXPECT_THROW(t.assign("zzz", FilterSpec::unity()), Error);
  EXPECT_THROW(t.reset("zzz"), Error);
}

TEST(TransformSetTest, TextRoundTrip) {
  const std::vector<std::string> ids = {"x1", "x2", "x3"};
  TransformSet t(ids);
  t.assign("x2", sample_irrelevant_filter(77));
  const TransformSet u = TransformSet::parse(t.serialize());
  EXPECT_EQ(u.serialize(), t.serialize());
  ASSERT_NE(u.find("x2"), nullptr);
  EXPECT_EQ(u.find("x2")->gains, t.find("x2")->gains);
  EXPECT_EQ(u.find("x1"), nullptr);
}

}  // namespace
}  // namespace tagvalid
