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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"
#include "tagvalid/spectrum.hpp"

namespace tagvalid {
namespace {

std::size_t conv_fft_size(std::size_t signal_len, std::size_t taps) {
  return next_power_of_two(signal_len + taps - 1);
}

void load_padded(RealFft& fft, std::span<const double> x) {
  auto t = fft.time();
  std::copy(x.begin(), x.end(), t.begin());
  std::fill(t.begin() + static_cast<std::ptrdiff_t>(x.size()), t.end(), 0.0);
}

// Spectrum of x zero-padded to fft.size(), as interleaved re/im.
std::vector<double> padded_spectrum(RealFft& fft, std::span<const double> x) {
  load_padded(fft, x);
  fft.forward();
  const auto f = fft.freq();
  std::vector<double> out(2 * f.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    out[2 * k] = f[k].real();
    out[2 * k + 1] = f[k].imag();
  }
  return out;
}

// Delay-compensated linear convolution given the signal spectrum and the
// kernel spectrum (both of size nfft).
std::vector<double> convolve_spectra(RealFft& fft, std::span<const double> signal_spec,
                                     std::span<const double> kernel_spec, std::size_t delay,
                                     std::size_t out_len) {
  auto f = fft.freq();
  for (std::size_t k = 0; k < f.size(); ++k) {
    const std::complex<double> a(signal_spec[2 * k], signal_spec[2 * k + 1]);
    const std::complex<double> b(kernel_spec[2 * k], kernel_spec[2 * k + 1]);
    f[k] = a * b;
  }
  fft.inverse();
  const auto t = fft.time();
  const double scale = 1.0 / static_cast<double>(fft.size());
  std::vector<double> y(out_len);
  for (std::size_t n = 0; n < out_len; ++n) y[n] = t[n + delay] * scale;
  return y;
}

// cos(pi * j / (2 * channels)) for j in [0, 4 * channels).
std::vector<double> modulation_table(std::size_t channels) {
  const std::size_t period = 4 * channels;
  std::vector<double> table(period);
  for (std::size_t j = 0; j < period; ++j) {
    table[j] = std::cos(std::numbers::pi * static_cast<double>(j) / static_cast<double>(2 * channels));
  }
  return table;
}

std::vector<double> composite_taps(const FilterbankDesign& design, std::span<const double> gains) {
  const std::size_t len = design.length();
  const auto c = static_cast<std::ptrdiff_t>(design.delay());
  const std::size_t period = 4 * design.channels;
  const std::vector<double> table = modulation_table(design.channels);
  std::vector<double> taps(len, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    const double p = design.prototype[n];
    if (p == 0.0) continue;
    const auto m = static_cast<std::size_t>(std::abs(static_cast<std::ptrdiff_t>(n) - c));
    double acc = 0.0;
    for (std::size_t k = 0; k < design.channels; ++k) {
      acc += gains[k] * table[((2 * k + 1) * m) % period];
    }
    taps[n] = 2.0 * p * acc;
  }
  return taps;
}

}  // namespace

double FilterbankDesign::center_hz(std::size_t channel, int sample_rate) const {
  return (static_cast<double>(channel) + 0.5) * sample_rate / (2.0 * static_cast<double>(channels));
}

std::vector<double> FilterbankDesign::channel_response(std::size_t channel) const {
  if (channel >= channels) throw Error(ErrorKind::kShape, "channel index out of range");
  std::vector<double> gains(channels, 0.0);
  gains[channel] = 1.0;
  return composite_taps(*this, gains);
}

FilterbankDesign design_filterbank(std::size_t channels, std::size_t taps_per_channel) {
  if (channels < 2) throw Error(ErrorKind::kDesign, "need at least 2 channels");
  if (taps_per_channel < 8) throw Error(ErrorKind::kDesign, "need at least 8 taps per channel");
  if (channels > 4096 || channels * taps_per_channel > (std::size_t{1} << 22)) {
    throw Error(ErrorKind::kDesign, "prototype length too large");
  }
  FilterbankDesign design;
  design.channels = channels;
  design.taps_per_channel = taps_per_channel;
  const std::size_t half = channels * taps_per_channel / 2;
  const std::size_t spacing = 2 * channels;  // zero crossings of the sinc
  design.prototype.assign(2 * half + 1, 0.0);
  for (std::size_t i = 0; i <= 2 * half; ++i) {
    const double m = static_cast<double>(i) - static_cast<double>(half);
    const auto am = static_cast<std::size_t>(std::abs(m));
    double s;
    if (am == 0) {
      s = 1.0;
    } else if (am % spacing == 0) {
      s = 0.0;
    } else {
      const double x = std::numbers::pi * m / static_cast<double>(spacing);
      s = std::sin(x) / x;
    }
    const double u = m / static_cast<double>(half);
    const double w = 0.42 + 0.5 * std::cos(std::numbers::pi * u) + 0.08 * std::cos(2.0 * std::numbers::pi * u);
    design.prototype[i] = s * w / static_cast<double>(spacing);
  }
  return design;
}

FilterSpec FilterSpec::unity(std::size_t channels) {
  return FilterSpec{std::vector<double>(channels, 1.0), 0, false};
}

FilterSpec FilterSpec::uniform(double gain, std::size_t channels) {
  return FilterSpec{std::vector<double>(channels, gain), 0, gain != 1.0};
}

std::string FilterSpec::serialize() const {
  std::string out = std::to_string(seed);
  char buf[32];
  for (double g : gains) {
    std::snprintf(buf, sizeof buf, " %.6g", g);
    out += buf;
  }
  return out;
}

FilterSpec FilterSpec::parse(const std::string& line) {
  std::istringstream in(line);
  std::uint64_t seed = 0;
  if (!(in >> seed)) throw Error(ErrorKind::kFormat, "filter spec missing seed");
  std::vector<double> listed;
  double g;
  while (in >> g) listed.push_back(g);
  if (listed.empty()) throw Error(ErrorKind::kFormat, "filter spec has no gains");
  FilterSpec spec = sample_irrelevant_filter(seed, listed.size());
  for (std::size_t k = 0; k < listed.size(); ++k) {
    if (std::abs(spec.gains[k] - listed[k]) > 1e-5 * std::max(1.0, std::abs(listed[k]))) {
      throw Error(ErrorKind::kFormat, "filter spec gains do not match seed " + std::to_string(seed));
    }
  }
  return spec;
}

FilterSpec sample_irrelevant_filter(std::uint64_t seed, std::size_t channels) {
  Rng rng(seed);
  std::vector<bool> selected(channels, false);
  bool any = false;
  while (!any) {
    for (std::size_t k = 0; k < channels; ++k) {
      selected[k] = rng.bernoulli(0.5);
      any = any || selected[k];
    }
  }
  FilterSpec spec;
  spec.seed = seed;
  spec.gains.assign(channels, 1.0);
  bool all = true;
  for (std::size_t k = 0; k < channels; ++k) {
    if (!selected[k]) {
      all = false;
      continue;
    }
    const double attenuation_db = kMaxAttenuationDb * (1.0 - rng.uniform());  // (0, 20]
    spec.gains[k] = std::pow(10.0, -attenuation_db / 20.0);
  }
  spec.uniform_attenuation = all;
  return spec;
}

FilterKernel::FilterKernel(const FilterSpec& spec, const FilterbankDesign& design)
    : delay_(design.delay()) {
  if (spec.gains.size() != design.channels) {
    throw Error(ErrorKind::kShape, "filter spec has " + std::to_string(spec.gains.size()) +
                                       " gains, design has " + std::to_string(design.channels) +
                                       " channels");
  }
  taps_ = composite_taps(design, spec.gains);
}

std::vector<double> FilterKernel::apply(std::span<const double> samples) const {
  if (samples.empty()) return {};
  const std::size_t nfft = conv_fft_size(samples.size(), taps_.size());
  RealFft& fft = cached_fft(nfft);
  if (cached_nfft_ != nfft) {
    cached_response_ = padded_spectrum(fft, taps_);
    cached_nfft_ = nfft;
  }
  const std::vector<double> x = padded_spectrum(fft, samples);
  return convolve_spectra(fft, x, cached_response_, delay_, samples.size());
}

AudioClip apply_filter(const AudioClip& clip, const FilterSpec& spec, const FilterbankDesign& design) {
  const FilterKernel kernel(spec, design);
  AudioClip out;
  out.id = clip.id;
  out.sample_rate = clip.sample_rate;
  out.samples = kernel.apply(clip.samples);
  return out;
}

std::vector<std::vector<double>> analyze(std::span<const double> samples, const FilterbankDesign& design) {
  std::vector<std::vector<double>> subbands;
  if (samples.empty()) return std::vector<std::vector<double>>(design.channels);
  const std::size_t nfft = conv_fft_size(samples.size(), design.length());
  RealFft& fft = cached_fft(nfft);
  const std::vector<double> x = padded_spectrum(fft, samples);
  subbands.reserve(design.channels);
  for (std::size_t k = 0; k < design.channels; ++k) {
    const std::vector<double> h = padded_spectrum(fft, design.channel_response(k));
    subbands.push_back(convolve_spectra(fft, x, h, design.delay(), samples.size()));
  }
  return subbands;
}

std::vector<double> synthesize(const std::vector<std::vector<double>>& subbands,
                               std::span<const double> gains) {
  if (subbands.size() != gains.size()) throw Error(ErrorKind::kShape, "gain count != subband count");
  if (subbands.empty()) return {};
  std::vector<double> out(subbands.front().size(), 0.0);
  for (std::size_t k = 0; k < subbands.size(); ++k) {
    if (subbands[k].size() != out.size()) throw Error(ErrorKind::kShape, "ragged subbands");
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += gains[k] * subbands[k][n];
  }
  return out;
}

double error_db(std::span<const double> reference, std::span<const double> estimate) {
  if (reference.size() != estimate.size()) throw Error(ErrorKind::kShape, "length mismatch");
  double signal = 0.0, noise = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    signal += reference[i] * reference[i];
    const double d = reference[i] - estimate[i];
    noise += d * d;
  }
  if (signal <= 0.0) throw Error(ErrorKind::kUndefined, "reference signal is silent");
  if (noise <= 0.0) return kErrorFloorDb;
  return std::max(kErrorFloorDb, 10.0 * std::log10(noise / signal));
}

double reconstruction_error_db(const AudioClip& clip, const FilterbankDesign& design) {
  const AudioClip y = apply_filter(clip, FilterSpec::unity(design.channels), design);
  return error_db(clip.samples, y.samples);
}

TransformSet::TransformSet(std::span<const std::string> ids) {
  for (const auto& id : ids) entries_.emplace(id, std::nullopt);
}

void TransformSet::assign(const std::string& id, const FilterSpec& spec) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorKind::kShape, "no instance '" + id + "' in transform set");
  it->second = spec;
}

void TransformSet::reset(const std::string& id) {
  const auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorKind::kShape, "no instance '" + id + "' in transform set");
  it->second = std::nullopt;
}

const FilterSpec* TransformSet::find(const std::string& id) const {
  const auto it = entries_.find(id);
  if (it == entries_.end() || !it->second) return nullptr;
  return &*it->second;
}

std::size_t TransformSet::transformed_count() const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.second.has_value(); }));
}

std::string TransformSet::serialize() const {
  std::string out;
  for (const auto& [id, spec] : entries_) {
    out += id;
    out += '\t';
    out += spec ? spec->serialize() : std::string("identity");
    out += '\n';
  }
  return out;
}

TransformSet TransformSet::parse(const std::string& text) {
  TransformSet set;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorKind::kFormat, "transform set line " + std::to_string(line_no) + " has no tab");
    }
    const std::string id = line.substr(0, tab);
    const std::string rest = line.substr(tab + 1);
    if (rest == "identity") set.entries_[id] = std::nullopt;
    else set.entries_[id] = FilterSpec::parse(rest);
  }
  return set;
}

}  // namespace tagvalid
