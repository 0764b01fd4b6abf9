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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tagvalid {

inline constexpr int kCanonicalSampleRate = 22050;

// Mono signal; samples are finite and within [-1, 1].
struct AudioClip {
  std::string id;
  std::vector<double> samples;
  int sample_rate = kCanonicalSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

enum class Window { kRectangular, kHann };

struct FrameSpec {
  std::size_t frame_len = 512;
  std::size_t hop = 256;
  Window window = Window::kHann;

  // Rounds a duration to the nearest power-of-two frame length at `rate`.
  // 23.2 ms at 22050 Hz gives 512, 93 ms gives 2048.
  static std::size_t frame_len_for(double milliseconds, int rate);
  // Frame spec with 50% overlap.
  static FrameSpec half_overlap(double milliseconds, int rate, Window window);
};

// Contiguous frame matrix, row k holds frame k.
class Frames {
 public:
  Frames(std::size_t frame_len, std::size_t count)
      : frame_len_(frame_len), count_(count), data_(frame_len * count) {}

  std::size_t size() const { return count_; }
  std::size_t frame_len() const { return frame_len_; }
  std::span<double> operator[](std::size_t k) {
    return {data_.data() + k * frame_len_, frame_len_};
  }
  std::span<const double> operator[](std::size_t k) const {
    return {data_.data() + k * frame_len_, frame_len_};
  }

 private:
  std::size_t frame_len_;
  std::size_t count_;
  std::vector<double> data_;
};

std::vector<double> make_window(Window window, std::size_t n);

// Number of full frames; the trailing partial frame is discarded.
std::size_t frame_count(std::size_t signal_len, const FrameSpec& spec);

Frames frame_signal(const AudioClip& clip, const FrameSpec& spec);
Frames frame_signal(std::span<const double> samples, const FrameSpec& spec);

// Reads PCM WAV (8/16/24-bit integer or 32-bit float, mono or stereo).
// Stereo is downmixed by channel mean; the native rate is kept.
AudioClip load_wav(const std::filesystem::path& path);
AudioClip decode_wav(std::span<const unsigned char> bytes, std::string id = {});

// Writes 16-bit PCM mono; samples are clipped to [-1, 1].
void write_wav(const std::filesystem::path& path, const AudioClip& clip);
std::vector<unsigned char> encode_wav16(const AudioClip& clip);

// Windowed-sinc (Blackman, 32 zero crossings) resampler.
AudioClip resample(const AudioClip& clip, int target_rate);
// Returns the clip unchanged if it is already at the canonical rate.
AudioClip to_canonical_rate(const AudioClip& clip);

}  // namespace tagvalid
