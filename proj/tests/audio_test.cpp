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

#include "tagvalid/audio.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"
#include "tagvalid/spectrum.hpp"

namespace tagvalid {
namespace {

// Little-endian WAV builder used to exercise the decoder on hand-made headers.
class WavBytes {
 public:
  WavBytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits)
      : format_(format), channels_(channels), rate_(rate), bits_(bits) {}

  template <typename T>
  WavBytes& sample(T v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    data_.insert(data_.end(), p, p + sizeof(T));
    return *this;
  }
  WavBytes& raw(std::initializer_list<unsigned char> bytes) {
    data_.insert(data_.end(), bytes);
    return *this;
  }

  std::vector<unsigned char> bytes() const {
    std::vector<unsigned char> out;
    auto put = [&](const void* p, std::size_t n) {
      const auto* c = static_cast<const unsigned char*>(p);
      out.insert(out.end(), c, c + n);
    };
    auto u32 = [&](std::uint32_t v) { put(&v, 4); };
    auto u16 = [&](std::uint16_t v) { put(&v, 2); };
    put("RIFF", 4);
    u32(static_cast<std::uint32_t>(36 + data_.size()));
    put("WAVE", 4);
    put("fmt ", 4);
    u32(16);
    u16(format_);
    u16(channels_);
    u32(rate_);
    u32(rate_ * channels_ * bits_ / 8);
    u16(static_cast<std::uint16_t>(channels_ * bits_ / 8));
    u16(bits_);
    put("data", 4);
    u32(static_cast<std::uint32_t>(data_.size()));
    out.insert(out.end(), data_.begin(), data_.end());
    return out;
  }

 private:
  std::uint16_t format_, channels_;
  std::uint32_t rate_;
  std::uint16_t bits_;
  std::vector<unsigned char> data_;
};

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::kData;
}

TEST(DecodeWav, Pcm16Scaling) {
  const auto bytes = WavBytes(1, 1, 22050, 16).sample<std::int16_t>(16384).sample<std::int16_t>(-32768).bytes();
  const AudioClip clip = decode_wav(bytes, "x");
  ASSERT_EQ(clip.samples.size(), 2u);
  EXPECT_NEAR(clip.samples[0], 0.5, 1.0 / 32768);
  EXPECT_NEAR(clip.samples[1], -1.0, 1.0 / 32768);
  EXPECT_EQ(clip.id, "x");
}

TEST(DecodeWav, StereoDownmixIsChannelMean) {
  const auto bytes = WavBytes(3, 2, 22050, 32).sample(0.2f).sample(0.6f).bytes();
  const AudioClip clip = decode_wav(bytes);
  ASSERT_EQ(clip.samples.size(), 1u);
  EXPECT_NEAR(clip.samples[0], 0.4, 1e-7);
}

TEST(DecodeWav, EightAndTwentyFourBit) {
  const auto b8 = WavBytes(1, 1, 8000, 8).raw({128, 255, 0}).bytes();
  const AudioClip c8 = decode_wav(b8);
  ASSERT_EQ(c8.samples.size(), 3u);
  EXPECT_NEAR(c8.samples[0], 0.0, 1e-12);
  EXPECT_NEAR(c8.samples[1], 127.0 / 128.0, 1e-12);
  EXPECT_NEAR(c8.samples[2], -1.0, 1e-12);
  EXPECT_EQ(c8.sample_rate, 8000);

  const auto b24 = WavBytes(1, 1, 22050, 24).raw({0x00, 0x00, 0x40}).bytes();
  EXPECT_NEAR(decode_wav(b24).samples.at(0), 0.5, 1e-12);
}

TEST(DecodeWav, DurationArithmetic) {
  WavBytes w(1, 1, 44100, 16);
  for (int i = 0; i < 30 * 44100; ++i) w.sample<std::int16_t>(0);
  const AudioClip clip = decode_wav(w.bytes());
  EXPECT_EQ(clip.samples.size(), 1323000u);
  EXPECT_DOUBLE_EQ(clip.duration_seconds(), 30.0);
}

TEST(DecodeWav, ErrorsCarryKinds) {
  std::vector<unsigned char> junk = {'R', 'I', 'F', 'X', 0, 0};
  EXPECT_EQ(kind_of([&] { decode_wav(junk); }), ErrorKind::kFormat);
  const auto alaw = WavBytes(6, 1, 8000, 8).raw({1}).bytes();
  EXPECT_EQ(kind_of([&] { decode_wav(alaw); }), ErrorKind::kUnsupported);
  const auto six = WavBytes(1, 6, 8000, 16).sample<std::int16_t>(0).bytes();
  EXPECT_EQ(kind_of([&] { decode_wav(six); }), ErrorKind::kUnsupported);
  auto truncated = WavBytes(1, 1, 8000, 16).sample<std::int16_t>(0).bytes();
  truncated.resize(20);
  EXPECT_EQ(kind_of([&] { decode_wav(truncated); }), ErrorKind::kFormat);
}

TEST(Wav, RoundTripThroughFileIsWithinOneLsb) {
  Rng rng(4);
  AudioClip clip{"rt", std::vector<double>(1000)};
  for (double& v : clip.samples) v = rng.uniform(-0.99, 0.99);
  const auto path = std::filesystem::temp_directory_path() / "tagvalid_audio_test.wav";
  write_wav(path, clip);
  const AudioClip a = load_wav(path);
  const AudioClip b = load_wav(path);
  std::filesystem::remove(path);
  ASSERT_EQ(a.samples.size(), clip.samples.size());
  EXPECT_EQ(a.samples, b.samples);
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(a.samples[i], clip.samples[i], 1.0 / 32767);
}

TEST(Framing, CountAndTrailingDiscard) {
  EXPECT_EQ(frame_count(1000, {400, 200, Window::kRectangular}), 4u);
  const AudioClip clip{"c", std::vector<double>(1000, 1.0)};
  const Frames f = frame_signal(clip, {400, 200, Window::kRectangular});
  ASSERT_EQ(f.size(), 4u);
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (double v : f[k]) ASSERT_EQ(v, 1.0);
  }
}

TEST(Framing, TooShortIsAnError) {
  const AudioClip clip{"c", std::vector<double>(100, 0.0)};
  EXPECT_EQ(kind_of([&] { frame_signal(clip, {512, 256, Window::kHann}); }), ErrorKind::kTooShort);
}

TEST(Framing, HannSumIsHalfLength) {
  for (std::size_t n : {64u, 512u, 2048u}) {
    double s = 0.0;
    for (double w : make_window(Window::kHann, n)) s += w;
    EXPECT_NEAR(s / (n / 2.0), 1.0, 1e-9);
  }
}

TEST(Framing, NonOverlappingFramesConcatenateToInput) {
  Rng rng(5);
  std::vector<double> x(1037);
  for (double& v : x) v = rng.uniform(-1.0, 1.0);
  const Frames f = frame_signal(x, {100, 100, Window::kRectangular});
  ASSERT_EQ(f.size(), 10u);
  for (std::size_t k = 0; k < f.size(); ++k) {
    for (std::size_t i = 0; i < 100; ++i) ASSERT_EQ(f[k][i], x[k * 100 + i]);
  }
}

TEST(Framing, MillisecondSpecsRoundToPowersOfTwo) {
  EXPECT_EQ(FrameSpec::frame_len_for(23.2, 22050), 512u);
  EXPECT_EQ(FrameSpec::frame_len_for(93.0, 22050), 2048u);
  const FrameSpec s = FrameSpec::half_overlap(93.0, 22050, Window::kHann);
  EXPECT_EQ(s.hop, 1024u);
}

TEST(PowerSpectrum, CosineAtBinEight) {
  const std::size_t n = 256;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::cos(2 * std::numbers::pi * 8 * i / n);
  const auto p = power_spectrum(x);
  ASSERT_EQ(p.size(), n / 2 + 1);
  std::size_t best = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > p[best]) best = k;
  }
  EXPECT_EQ(best, 8u);
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (k != 8) {
      EXPECT_LT(p[k], 1e-12 * p[8]);
    }
  }
}

TEST(PowerSpectrum, ZeroFrameAndSizeError) {
  const std::vector<double> z(128, 0.0);
  for (double v : power_spectrum(z)) EXPECT_EQ(v, 0.0);
  const std::vector<double> odd(100, 1.0);
  EXPECT_EQ(kind_of([&] { power_spectrum(odd); }), ErrorKind::kSize);
}

TEST(PowerSpectrumProperty, ParsevalAndSignFlip) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = std::size_t{1} << (4 + rng.below(8));
    std::vector<double> x(n), neg(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      neg[i] = -x[i];
      energy += x[i] * x[i];
    }
    const auto p = power_spectrum(x);
    EXPECT_NEAR(spectrum_energy(p, n) / energy, 1.0, 1e-6);
    EXPECT_EQ(power_spectrum(neg), p);
  }
}

TEST(Resample, PreservesLowFrequencyTone) {
  const int rate = 44100;
  AudioClip clip{"r", std::vector<double>(rate)};
  clip.sample_rate = rate;
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    clip.samples[i] = 0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / rate);
  }
  const AudioClip out = to_canonical_rate(clip);
  EXPECT_EQ(out.sample_rate, kCanonicalSampleRate);
  ASSERT_NEAR(static_cast<double>(out.samples.size()), kCanonicalSampleRate, 1.0);
  double err = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 1000; i + 1000 < out.samples.size(); ++i) {
    const double want = 0.5 * std::sin(2 * std::numbers::pi * 440.0 * i / kCanonicalSampleRate);
    err = std::max(err, std::abs(out.samples[i] - want));
    ++count;
  }
  EXPECT_GT(count, 0u);
  EXPECT_LT(err, 1e-2);
}

TEST(Resample, SameRateIsIdentity) {
  const AudioClip clip{"s", {0.1, -0.2, 0.3}};
  EXPECT_EQ(to_canonical_rate(clip).samples, clip.samples);
}

}  // namespace
}  // namespace tagvalid
