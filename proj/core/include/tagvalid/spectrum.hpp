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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tagvalid {

// FFTW-backed real transform of a fixed size. Buffers are owned by the
// object so every execution sees the alignment the plan was made for.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return n_; }

  // Time-domain input buffer (n values) and spectrum buffer (n/2+1 values).
  std::span<double> time() { return {time_, n_}; }
  std::span<std::complex<double>> freq();

  void forward();  // time() -> freq()
  void inverse();  // freq() -> time(), unnormalized (scaled by n)

 private:
  std::size_t n_;
  double* time_ = nullptr;
  void* freq_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

// Per-thread cached transform of size n.
RealFft& cached_fft(std::size_t n);

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

// |X_k|^2 / N for k = 0..N/2, so that P_0 + P_{N/2} + 2*sum(P_1..P_{N/2-1})
// equals the frame energy. N must be a power of two.
std::vector<double> power_spectrum(std::span<const double> frame);
void power_spectrum(std::span<const double> frame, std::span<double> out);

// Energy implied by a one-sided power spectrum of a length-n frame.
double spectrum_energy(std::span<const double> power, std::size_t n);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters on the HTK mel scale applied to a one-sided spectrum.
class MelFilterbank {
 public:
  MelFilterbank(std::size_t n_fft, int sample_rate, std::size_t bands,
                double fmin_hz, double fmax_hz);

  std::size_t bands() const { return ranges_.size(); }
  void apply(std::span<const double> power, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> power) const;

 private:
  struct Range {
    std::size_t first;
    std::vector<double> weights;
  };
  std::size_t n_bins_;
  std::vector<Range> ranges_;
};

// Orthonormal DCT-II, returning coefficients [first, first + out.size()).
void dct2(std::span<const double> in, std::size_t first, std::span<double> out);

// Tabulated form of dct2 for a fixed input length and coefficient range.
class Dct2 {
 public:
  Dct2(std::size_t n, std::size_t first, std::size_t count);
  std::size_t count() const { return count_; }
  void apply(std::span<const double> in, std::span<double> out) const;

 private:
  std::size_t n_;
  std::size_t count_;
  std::vector<double> table_;
};

}  // namespace tagvalid
