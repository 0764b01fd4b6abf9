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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

constexpr double kLogFloor = 1e-10;

const AudioClip& canonical(const AudioClip& clip, AudioClip& storage) {
  if (clip.sample_rate == kCanonicalSampleRate) return clip;
  storage = to_canonical_rate(clip);
  return storage;
}

FrameSpec short_frames() {
  return FrameSpec::half_overlap(23.2, kCanonicalSampleRate, Window::kHann);
}

FrameSpec long_frames() {
  return FrameSpec::half_overlap(93.0, kCanonicalSampleRate, Window::kHann);
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

template <typename Get>
MeanStd mean_std(std::size_t n, Get get) {
  MeanStd r;
  if (n == 0) return r;
  for (std::size_t i = 0; i < n; ++i) r.mean += get(i);
  r.mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = get(i) - r.mean;
    var += d * d;
  }
  r.std = std::sqrt(var / static_cast<double>(n));
  return r;
}

}  // namespace

MfccComputer::MfccComputer(std::size_t frame_len, int sample_rate)
    : mel_(frame_len, sample_rate, kMfccMelBands, 0.0, sample_rate / 2.0),
      dct_(kMfccMelBands, 1, kMfccCoeffs) {}

void MfccComputer::compute(std::span<const double> power, std::span<double> out) const {
  std::array<double, kMfccMelBands> bands{};
  mel_.apply(power, bands);
  for (double& b : bands) b = std::log(std::max(b, kLogFloor));
  dct_.apply(bands, out);
}

LowLevelExtractor::LowLevelExtractor(std::size_t frame_len, int sample_rate)
    : frame_len_(frame_len), sample_rate_(sample_rate), mfcc_(frame_len, sample_rate) {}

LowLevelVector LowLevelExtractor::compute(std::span<const double> frame, std::span<const double> power,
                                          std::span<const double> prev_power) const {
  if (frame.size() != frame_len_ || power.size() != frame_len_ / 2 + 1) {
    throw Error(ErrorKind::kShape, "low-level features expect " + std::to_string(frame_len_) + "-sample frames");
  }
  LowLevelVector v{};

  std::size_t crossings = 0;
  for (std::size_t i = 1; i < frame.size(); ++i) {
    if ((frame[i - 1] < 0.0 && frame[i] >= 0.0) || (frame[i - 1] >= 0.0 && frame[i] < 0.0)) ++crossings;
  }
  v[0] = static_cast<double>(crossings) / static_cast<double>(frame.size() - 1);

  const double bin_hz = static_cast<double>(sample_rate_) / static_cast<double>(frame_len_);
  double total = 0.0, weighted = 0.0;
  std::vector<double> magnitude(power.size());
  for (std::size_t k = 0; k < power.size(); ++k) {
    magnitude[k] = std::sqrt(power[k]);
    total += magnitude[k];
    weighted += magnitude[k] * static_cast<double>(k) * bin_hz;
  }
  if (total > 0.0) {
    v[1] = weighted / total;
    const double target = kRolloffFraction * total;
    double running = 0.0;
    std::size_t k = 0;
    for (; k < magnitude.size(); ++k) {
      running += magnitude[k];
      if (running >= target) break;
    }
    v[2] = static_cast<double>(std::min(k, magnitude.size() - 1)) * bin_hz;
  }

  if (!prev_power.empty()) {
    if (prev_power.size() != power.size()) throw Error(ErrorKind::kShape, "flux spectra differ in size");
    double flux = 0.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double d = magnitude[k] - std::sqrt(prev_power[k]);
      flux += d * d;
    }
    v[3] = std::sqrt(flux);
  }

  mfcc_.compute(power, std::span<double>(v.data() + 4, kMfccCoeffs));
  return v;
}

LowLevelVector low_level_frame_features(std::span<const double> frame, std::span<const double> power,
                                        std::span<const double> prev_power) {
  static const LowLevelExtractor extractor;
  return extractor.compute(frame, power, prev_power);
}

std::vector<LowLevelVector> low_level_sequence(const AudioClip& input) {
  AudioClip storage;
  const AudioClip& clip = canonical(input, storage);
  FrameSpec raw = short_frames();
  raw.window = Window::kRectangular;
  const Frames frames = frame_signal(clip, raw);
  const std::vector<double> window = make_window(Window::kHann, raw.frame_len);
  static const LowLevelExtractor extractor;

  std::vector<LowLevelVector> out;
  out.reserve(frames.size());
  std::vector<double> windowed(raw.frame_len);
  std::vector<double> power(raw.frame_len / 2 + 1), prev;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto frame = frames[f];
    for (std::size_t i = 0; i < frame.size(); ++i) windowed[i] = frame[i] * window[i];
    power_spectrum(windowed, power);
    out.push_back(extractor.compute(frame, power, prev));
    prev = power;
  }
  return out;
}

BffVector bff(const AudioClip& clip) {
  const std::vector<LowLevelVector> frames = low_level_sequence(clip);
  if (frames.size() < 2) throw Error(ErrorKind::kTooShort, "bag of frames needs at least 2 frames");

  const FrameSpec spec = short_frames();
  const auto window_frames = static_cast<std::size_t>(
      std::floor(kTextureWindowSeconds * kCanonicalSampleRate / static_cast<double>(spec.hop)));
  std::size_t n_windows = frames.size() / window_frames;
  std::size_t per_window = window_frames;
  if (n_windows == 0) {
    // Shorter than one texture window: the whole clip is the only window.
    n_windows = 1;
    per_window = frames.size();
  }

  std::vector<LowLevelVector> means(n_windows), stds(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) {
    const std::size_t base = w * per_window;
    for (std::size_t d = 0; d < kLowLevelDims; ++d) {
      const MeanStd ms = mean_std(per_window, [&](std::size_t i) { return frames[base + i][d]; });
      means[w][d] = ms.mean;
      stds[w][d] = ms.std;
    }
  }

  BffVector out;
  for (std::size_t d = 0; d < kLowLevelDims; ++d) {
    const MeanStd of_means = mean_std(n_windows, [&](std::size_t w) { return means[w][d]; });
    const MeanStd of_stds = mean_std(n_windows, [&](std::size_t w) { return stds[w][d]; });
    out.values[d] = of_means.mean;
    out.values[kLowLevelDims + d] = of_stds.mean;
    out.values[2 * kLowLevelDims + d] = of_means.std;
    out.values[3 * kLowLevelDims + d] = of_stds.std;
  }
  return out;
}

MfccSequence mfcc_sequence(const AudioClip& input, const FrameSpec& spec) {
  AudioClip storage;
  const AudioClip& clip = canonical(input, storage);
  const Frames frames = frame_signal(clip, spec);
  const MfccComputer mfcc(spec.frame_len, kCanonicalSampleRate);
  MfccSequence seq;
  seq.spec = spec;
  seq.frames.resize(frames.size());
  std::vector<double> power(spec.frame_len / 2 + 1);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    power_spectrum(frames[f], power);
    mfcc.compute(power, seq.frames[f]);
  }
  return seq;
}

MfccSequence mfcc_sequence(const AudioClip& clip) { return mfcc_sequence(clip, long_frames()); }

AmVector am_features(const AudioClip& input) {
  AudioClip storage;
  const AudioClip& clip = canonical(input, storage);
  const FrameSpec spec = short_frames();
  const Frames frames = frame_signal(clip, spec);
  const MelFilterbank mel(spec.frame_len, kCanonicalSampleRate, kAmBands, 0.0, kCanonicalSampleRate / 2.0);

  // Amplitude envelope per mel band, band-major.
  const std::size_t n = frames.size();
  std::vector<double> envelope(kAmBands * n);
  std::vector<double> power(spec.frame_len / 2 + 1);
  std::array<double, kAmBands> bands{};
  for (std::size_t f = 0; f < n; ++f) {
    power_spectrum(frames[f], power);
    mel.apply(power, bands);
    for (std::size_t b = 0; b < kAmBands; ++b) envelope[b * n + f] = std::sqrt(bands[b]);
  }

  const double frame_rate = static_cast<double>(kCanonicalSampleRate) / static_cast<double>(spec.hop);
  const auto segment_frames = static_cast<std::size_t>(std::lround(kAmSegmentSeconds * frame_rate));
  const std::size_t nfft = next_power_of_two(segment_frames);
  std::size_t n_segments = n / segment_frames;
  std::size_t per_segment = segment_frames;
  if (n_segments == 0) {
    n_segments = 1;
    per_segment = n;  // zero-padded up to the segment transform length
  }

  // Modulation-bin edges, log-spaced over [0.25, 16] Hz, as FFT bin ranges.
  std::array<std::size_t, kAmModulationBins> lo{}, hi{};
  const double bin_hz = frame_rate / static_cast<double>(nfft);
  for (std::size_t m = 0; m < kAmModulationBins; ++m) {
    const double ratio = kAmMaxModHz / kAmMinModHz;
    const double f0 = kAmMinModHz * std::pow(ratio, static_cast<double>(m) / kAmModulationBins);
    const double f1 = kAmMinModHz * std::pow(ratio, static_cast<double>(m + 1) / kAmModulationBins);
    lo[m] = static_cast<std::size_t>(std::ceil(f0 / bin_hz));
    hi[m] = std::max(lo[m] + 1, static_cast<std::size_t>(std::ceil(f1 / bin_hz)));
  }

  RealFft& fft = cached_fft(nfft);
  const std::vector<double> window = make_window(Window::kHann, per_segment);
  AmVector out;
  for (std::size_t s = 0; s < n_segments; ++s) {
    for (std::size_t b = 0; b < kAmBands; ++b) {
      const double* env = envelope.data() + b * n + s * per_segment;
      double mean = 0.0;
      for (std::size_t i = 0; i < per_segment; ++i) mean += env[i];
      mean /= static_cast<double>(per_segment);
      auto t = fft.time();
      std::fill(t.begin(), t.end(), 0.0);
      for (std::size_t i = 0; i < per_segment; ++i) t[i] = (env[i] - mean) * window[i];
      fft.forward();
      const auto spectrum = fft.freq();
      for (std::size_t m = 0; m < kAmModulationBins; ++m) {
        double acc = 0.0;
        for (std::size_t k = lo[m]; k < hi[m]; ++k) acc += std::abs(spectrum[k]);
        out.values[b * kAmModulationBins + m] +=
            acc / static_cast<double>(hi[m] - lo[m]) / static_cast<double>(per_segment);
      }
    }
  }
  for (double& v : out.values) v /= static_cast<double>(n_segments);
  return out;
}

ClipFeatures extract_features(const AudioClip& input, std::span<const FeatureKind> kinds) {
  AudioClip storage;
  const AudioClip& clip = canonical(input, storage);
  ClipFeatures out;
  for (FeatureKind kind : kinds) {
    switch (kind) {
      case FeatureKind::kBff:
        if (!out.bff) out.bff = bff(clip);
        break;
      case FeatureKind::kMfcc:
        if (!out.mfcc) out.mfcc = mfcc_sequence(clip);
        break;
      case FeatureKind::kAm:
        if (!out.am) out.am = am_features(clip);
        break;
    }
  }
  return out;
}

}  // namespace tagvalid
