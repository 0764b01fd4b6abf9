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

#include "tagvalid/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "tagvalid/error.hpp"

namespace tagvalid {
namespace {

// The FFTW planner is not reentrant; execution on owned buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
  if (n < 2) throw Error(ErrorKind::kSize, "FFT size must be at least 2");
  time_ = fftw_alloc_real(n);
  auto* freq = fftw_alloc_complex(n / 2 + 1);
  freq_ = freq;
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq, time_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  fftw_free(time_);
  fftw_free(freq_);
}

std::span<std::complex<double>> RealFft::freq() {
  return {reinterpret_cast<std::complex<double>*>(freq_), n_ / 2 + 1};
}

void RealFft::forward() { fftw_execute(static_cast<fftw_plan>(forward_plan_)); }
void RealFft::inverse() { fftw_execute(static_cast<fftw_plan>(inverse_plan_)); }

RealFft& cached_fft(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void power_spectrum(std::span<const double> frame, std::span<double> out) {
  const std::size_t n = frame.size();
  if (!is_power_of_two(n) || n < 2) {
    throw Error(ErrorKind::kSize, "power spectrum needs a power-of-two frame, got " + std::to_string(n));
  }
  if (out.size() != n / 2 + 1) throw Error(ErrorKind::kShape, "power spectrum output size");
  RealFft& fft = cached_fft(n);
  std::copy(frame.begin(), frame.end(), fft.time().begin());
  fft.forward();
  const auto spec = fft.freq();
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < spec.size(); ++k) out[k] = std::norm(spec[k]) * scale;
}

std::vector<double> power_spectrum(std::span<const double> frame) {
  std::vector<double> out(frame.size() / 2 + 1);
  power_spectrum(frame, out);
  return out;
}

double spectrum_energy(std::span<const double> power, std::size_t n) {
  if (power.empty()) return 0.0;
  double e = power.front();
  const std::size_t last = power.size() - 1;
  for (std::size_t k = 1; k < last; ++k) e += 2.0 * power[k];
  if (last > 0) e += (n % 2 == 0) ? power[last] : 2.0 * power[last];
  return e;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(std::size_t n_fft, int sample_rate, std::size_t bands,
                             double fmin_hz, double fmax_hz)
    : n_bins_(n_fft / 2 + 1) {
  if (bands == 0 || !(fmax_hz > fmin_hz)) throw Error(ErrorKind::kSize, "mel filterbank parameters");
  const double mel_lo = hz_to_mel(fmin_hz);
  const double mel_hi = hz_to_mel(fmax_hz);
  const double bin_hz = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
  ranges_.reserve(bands);
  for (std::size_t b = 0; b < bands; ++b) {
    const double step = (mel_hi - mel_lo) / static_cast<double>(bands + 1);
    const double left = mel_to_hz(mel_lo + step * static_cast<double>(b));
    const double center = mel_to_hz(mel_lo + step * static_cast<double>(b + 1));
    const double right = mel_to_hz(mel_lo + step * static_cast<double>(b + 2));
    Range range{n_bins_, {}};
    std::vector<double> weights;
    for (std::size_t k = 0; k < n_bins_; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > left && f <= center) w = (f - left) / (center - left);
      else if (f > center && f < right) w = (right - f) / (right - center);
      if (w > 0.0) {
        if (range.first == n_bins_) range.first = k;
        range.weights.resize(k - range.first + 1, 0.0);
        range.weights[k - range.first] = w;
      }
    }
    if (range.first == n_bins_) range.first = 0;
    ranges_.push_back(std::move(range));
  }
}

void MelFilterbank::apply(std::span<const double> power, std::span<double> out) const {
  if (power.size() != n_bins_ || out.size() != ranges_.size()) {
    throw Error(ErrorKind::kShape, "mel filterbank input/output size");
  }
  for (std::size_t b = 0; b < ranges_.size(); ++b) {
    const Range& r = ranges_[b];
    double acc = 0.0;
    for (std::size_t i = 0; i < r.weights.size(); ++i) acc += r.weights[i] * power[r.first + i];
    out[b] = acc;
  }
}

std::vector<double> MelFilterbank::apply(std::span<const double> power) const {
  std::vector<double> out(ranges_.size());
  apply(power, out);
  return out;
}

void dct2(std::span<const double> in, std::size_t first, std::span<double> out) {
  const std::size_t n = in.size();
  if (first + out.size() > n) throw Error(ErrorKind::kShape, "dct coefficient range");
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const std::size_t k = first + j;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += in[i] * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / nd);
    }
    const double scale = (k == 0) ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    out[j] = acc * scale;
  }
}

Dct2::Dct2(std::size_t n, std::size_t first, std::size_t count)
    : n_(n), count_(count), table_(n * count) {
  if (first + count > n) throw Error(ErrorKind::kShape, "dct coefficient range");
  const double nd = static_cast<double>(n);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t k = first + j;
    const double scale = (k == 0) ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
    for (std::size_t i = 0; i < n; ++i) {
      table_[j * n + i] =
          scale * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / nd);
    }
  }
}

void Dct2::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != n_ || out.size() != count_) throw Error(ErrorKind::kShape, "dct input/output size");
  for (std::size_t j = 0; j < count_; ++j) {
    const double* row = table_.data() + j * n_;
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) acc += row[i] * in[i];
    out[j] = acc;
  }
}

}  // namespace tagvalid
