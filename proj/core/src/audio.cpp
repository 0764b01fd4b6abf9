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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xfffe;

double decode_sample(const unsigned char* p, int bits, bool is_float) {
  if (is_float) {
    static_assert(sizeof(float) == 4);
    const std::uint32_t raw = read_u32(p);
    float f;
    std::memcpy(&f, &raw, sizeof f);
    return static_cast<double>(f);
  }
  switch (bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16:
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16));
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0;
    }
    default:
      throw Error(ErrorKind::kUnsupported, "bit depth " + std::to_string(bits));
  }
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

}  // namespace

std::size_t FrameSpec::frame_len_for(double milliseconds, int rate) {
  const double samples = milliseconds * 1e-3 * rate;
  if (!(samples >= 1.0)) throw Error(ErrorKind::kSize, "frame shorter than one sample");
  const double exponent = std::round(std::log2(samples));
  return std::size_t{1} << static_cast<int>(exponent);
}

FrameSpec FrameSpec::half_overlap(double milliseconds, int rate, Window window) {
  const std::size_t len = frame_len_for(milliseconds, rate);
  return FrameSpec{len, len / 2, window};
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (window == Window::kHann) {
    // Periodic Hann: sums to n/2 exactly.
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                  static_cast<double>(n));
    }
  }
  return w;
}

std::size_t frame_count(std::size_t signal_len, const FrameSpec& spec) {
  if (signal_len < spec.frame_len) return 0;
  return (signal_len - spec.frame_len) / spec.hop + 1;
}

Frames frame_signal(std::span<const double> samples, const FrameSpec& spec) {
  if (spec.hop == 0 || spec.hop > spec.frame_len) {
    throw Error(ErrorKind::kSize, "frame spec requires 0 < hop <= frame_len");
  }
  if (samples.size() < spec.frame_len) {
    throw Error(ErrorKind::kTooShort, "signal of " + std::to_string(samples.size()) +
                                          " samples is shorter than one frame of " +
                                          std::to_string(spec.frame_len));
  }
  const std::size_t count = frame_count(samples.size(), spec);
  const std::vector<double> window = make_window(spec.window, spec.frame_len);
  Frames frames(spec.frame_len, count);
  for (std::size_t k = 0; k < count; ++k) {
    auto dst = frames[k];
    const double* src = samples.data() + k * spec.hop;
    for (std::size_t i = 0; i < spec.frame_len; ++i) dst[i] = src[i] * window[i];
  }
  return frames;
}

Frames frame_signal(const AudioClip& clip, const FrameSpec& spec) {
  return frame_signal(std::span<const double>(clip.samples), spec);
}

AudioClip decode_wav(std::span<const unsigned char> bytes, std::string id) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kFormat, "missing RIFF/WAVE header");
  }
  std::size_t pos = 12;
  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + len > bytes.size()) {
      // Tolerate a truncated data chunk, reject anything else.
      if (std::memcmp(chunk, "data", 4) != 0) throw Error(ErrorKind::kFormat, "truncated chunk");
    }
    const std::size_t avail = std::min<std::size_t>(len, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorKind::kFormat, "fmt chunk too small");
      format = read_u16(chunk + 8);
      channels = read_u16(chunk + 10);
      rate = read_u32(chunk + 12);
      bits = read_u16(chunk + 22);
      if (format == kFormatExtensible) {
        if (avail < 26) throw Error(ErrorKind::kFormat, "extensible fmt chunk too small");
        format = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = avail;
    }
    pos = body + len + (len & 1u);
  }
  if (!have_fmt) throw Error(ErrorKind::kFormat, "missing fmt chunk");
  if (data == nullptr) throw Error(ErrorKind::kFormat, "missing data chunk");
  if (rate == 0) throw Error(ErrorKind::kFormat, "zero sample rate");
  const bool is_float = format == kFormatFloat;
  if (format != kFormatPcm && !is_float) {
    throw Error(ErrorKind::kUnsupported, "codec tag " + std::to_string(format));
  }
  if (is_float && bits != 32) throw Error(ErrorKind::kUnsupported, "float WAV must be 32-bit");
  if (!is_float && bits != 8 && bits != 16 && bits != 24) {
    throw Error(ErrorKind::kUnsupported, "PCM bit depth " + std::to_string(bits));
  }
  if (channels < 1 || channels > 2) {
    throw Error(ErrorKind::kUnsupported, std::to_string(channels) + " channels");
  }

  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t n = data_len / frame_bytes;
  AudioClip clip;
  clip.id = std::move(id);
  clip.sample_rate = static_cast<int>(rate);
  clip.samples.resize(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      acc += decode_sample(data + i * frame_bytes + c * bytes_per_sample, bits, is_float);
    }
    const double v = acc / channels;
    if (!std::isfinite(v)) throw Error(ErrorKind::kFormat, "non-finite sample");
    clip.samples[i] = v;
    peak = std::max(peak, std::abs(v));
  }
  // Only float data can exceed full scale; bring it back into [-1, 1].
  if (peak > 1.0) {
    for (double& v : clip.samples) v /= peak;
  }
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_wav(bytes, path.stem().string());
}

std::vector<unsigned char> encode_wav16(const AudioClip& clip) {
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  std::vector<unsigned char> out;
  out.reserve(44 + 2 * n);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + 2 * n);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, 2 * n);
  for (double v : clip.samples) {
    const double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32768.0);
    const auto s = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<std::uint16_t>(s));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

AudioClip resample(const AudioClip& clip, int target_rate) {
  if (target_rate <= 0) throw Error(ErrorKind::kSize, "target rate must be positive");
  if (clip.sample_rate == target_rate) return clip;
  const double ratio = static_cast<double>(target_rate) / clip.sample_rate;
  const double cutoff = std::min(1.0, ratio);
  constexpr double kZeroCrossings = 32.0;
  const double half_width = kZeroCrossings / cutoff;
  const auto n_in = static_cast<std::ptrdiff_t>(clip.samples.size());
  const auto n_out = static_cast<std::size_t>(std::llround(clip.samples.size() * ratio));

  AudioClip out;
  out.id = clip.id;
  out.sample_rate = target_rate;
  out.samples.resize(n_out);
  for (std::size_t m = 0; m < n_out; ++m) {
    const double t = static_cast<double>(m) / ratio;
    const auto lo = std::max<std::ptrdiff_t>(0, static_cast<std::ptrdiff_t>(std::ceil(t - half_width)));
    const auto hi = std::min<std::ptrdiff_t>(n_in - 1, static_cast<std::ptrdiff_t>(std::floor(t + half_width)));
    double acc = 0.0;
    for (std::ptrdiff_t k = lo; k <= hi; ++k) {
      const double d = t - static_cast<double>(k);
      const double x = d / half_width;  // in [-1, 1]
      const double w = 0.42 + 0.5 * std::cos(std::numbers::pi * x) + 0.08 * std::cos(2 * std::numbers::pi * x);
      acc += clip.samples[static_cast<std::size_t>(k)] * cutoff * sinc(cutoff * d) * w;
    }
    out.samples[m] = std::clamp(acc, -1.0, 1.0);
  }
  return out;
}

AudioClip to_canonical_rate(const AudioClip& clip) {
  return resample(clip, kCanonicalSampleRate);
}

}  // namespace tagvalid
