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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "tagvalid/audio.hpp"
#include "tagvalid/dataset.hpp"
#include "tagvalid/error.hpp"
#include "tagvalid/rng.hpp"

namespace tagvalid {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kRate = kCanonicalSampleRate;
constexpr std::uint64_t kArtistStream = 0xa57157ULL;

struct ArtistTimbre {
  double f0 = 200.0;          // register center, Hz
  int voice_partials = 12;    // 10..20
  double formant1 = 600.0;
  double formant2 = 1500.0;
  double formant3 = 2800.0;
  double vibrato_rate = 6.0;  // Hz
  double vibrato_depth = 0.02;
  double breath = 0.1;
  int partials = 5;           // instrument partials, 3..16
  double rolloff = 1.0;       // instrument partial h has amplitude h^-rolloff
  double bed_root = 110.0;
  int bed_partials = 4;
  double bed_rolloff = 1.5;
  double noise_color = 0.5;   // 0 white, 1 brown-ish
  double noise_level = 0.05;
  double lead_level = 0.5;
  bool female = false;
};

ArtistTimbre make_timbre(std::uint64_t seed, std::size_t artist) {
  Rng rng(mix_seed(mix_seed(seed, kArtistStream), artist));
  ArtistTimbre t;
  t.female = rng.bernoulli(0.5);
  t.f0 = (t.female ? 200.0 : 110.0) * std::exp2(rng.uniform(0.0, 0.8));
  t.voice_partials = 10 + static_cast<int>(rng.below(11));
  t.formant1 = rng.uniform(400.0, 800.0);
  t.formant2 = rng.uniform(1000.0, 2200.0);
  t.formant3 = rng.uniform(2500.0, 3200.0);
  t.vibrato_rate = rng.uniform(5.0, 7.0);
  t.vibrato_depth = rng.uniform(0.005, 0.02);
  t.breath = rng.uniform(0.02, 0.1);
  t.partials = 3 + static_cast<int>(rng.below(14));
  t.rolloff = rng.uniform(0.5, 1.6);
  t.bed_root = 65.0 * std::exp2(rng.uniform(0.0, 1.5));
  t.bed_partials = 2 + static_cast<int>(rng.below(6));
  t.bed_rolloff = rng.uniform(0.8, 2.0);
  t.noise_color = rng.uniform(0.0, 1.0);
  t.noise_level = rng.uniform(0.02, 0.12);
  t.lead_level = rng.uniform(0.25, 0.7);
  return t;
}

// Vocal-tract-like gain of a frequency: three resonances over a weak floor.
double formant_gain(double f, double f1, double f2, double f3) {
  auto peak = [](double f, double fc, double bw) {
    const double d = (f - fc) / bw;
    return 1.0 / (1.0 + d * d);
  };
  return 0.05 + peak(f, f1, 100.0) + 0.8 * peak(f, f2, 150.0) + 0.5 * peak(f, f3, 250.0);
}

// Sinusoid bank with incremental phase; sin() once per partial per sample.
void add_partial(std::vector<double>& out, std::size_t start, std::size_t len, double amp, double freq, double& phase,
                 const std::vector<double>& env) {
  const double step = kTwoPi * freq / kRate;
  for (std::size_t i = 0; i < len; ++i) {
    out[start + i] += amp * env[i] * std::sin(phase);
    phase += step;
  }
  phase = std::fmod(phase, kTwoPi);
}

void add_bed(std::vector<double>& out, const ArtistTimbre& t, Rng& rng) {
  const std::size_t n = out.size();
  // Chord changes every 2 to 3 seconds; each chord is root, fifth, octave.
  static constexpr double kRatios[] = {1.0, 1.5, 2.0};
  std::size_t start = 0;
  std::vector<double> phase(3 * static_cast<std::size_t>(t.bed_partials), 0.0);
  std::vector<double> env;
  while (start < n) {
    const std::size_t len = std::min(n - start, static_cast<std::size_t>(rng.uniform(2.0, 3.0) * kRate));
    const double root = t.bed_root * std::exp2(static_cast<double>(rng.below(5)) / 6.0);
    env.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      env[i] = std::min({1.0, static_cast<double>(i) / (0.05 * kRate), static_cast<double>(len - i) / (0.05 * kRate)});
    }
    for (std::size_t v = 0; v < 3; ++v) {
      for (int h = 1; h <= t.bed_partials; ++h) {
        const double f = root * kRatios[v] * h;
        if (f > 0.45 * kRate) continue;
        add_partial(out, start, len, 0.08 * std::pow(h, -t.bed_rolloff), f,
                    phase[v * t.bed_partials + static_cast<std::size_t>(h - 1)], env);
      }
    }
    start += len;
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = rng.uniform(-1.0, 1.0);
    lp = 0.98 * lp + 0.02 * w * 7.0;
    out[i] += t.noise_level * ((1.0 - t.noise_color) * w + t.noise_color * lp);
  }
}

// Hi-hat-like bursts of highpassed noise on a beat grid.
void add_percussion(std::vector<double>& out, Rng& rng) {
  const double beat = 60.0 / rng.uniform(90.0, 140.0) / 2.0;
  const double level = rng.uniform(0.05, 0.25);
  const double decay = rng.uniform(30.0, 80.0);
  double prev = 0.0;
  for (double t0 = rng.uniform(0.0, beat); t0 * kRate < static_cast<double>(out.size()); t0 += beat) {
    const std::size_t start = static_cast<std::size_t>(t0 * kRate);
    const std::size_t len = std::min(out.size() - start, static_cast<std::size_t>(0.12 * kRate));
    for (std::size_t i = 0; i < len; ++i) {
      const double w = rng.uniform(-1.0, 1.0);
      out[start + i] += level * (w - prev) * std::exp(-decay * static_cast<double>(i) / kRate);
      prev = w;
    }
  }
}

// Sung phrase: formant-shaped harmonics with vibrato, vowel glides within
// each note, and short noise bursts standing in for consonants.
void add_voice(std::vector<double>& out, const ArtistTimbre& t, double level, Rng& rng) {
  const std::size_t n = out.size();
  constexpr std::size_t kBlock = 32;
  std::size_t pos = static_cast<std::size_t>(rng.uniform(0.0, 0.3) * kRate);
  std::vector<double> phase(static_cast<std::size_t>(t.voice_partials), 0.0);
  std::vector<double> amps(phase.size());
  double vib_phase = rng.uniform(0.0, kTwoPi);
  double hp_prev = 0.0;
  while (pos < n) {
    const std::size_t len = std::min(n - pos, static_cast<std::size_t>(rng.uniform(0.25, 0.8) * kRate));
    const double f_note = t.f0 * std::exp2(static_cast<double>(static_cast<int>(rng.below(11)) - 5) / 12.0);
    const double a1 = t.formant1 * rng.uniform(0.75, 1.3), b1 = t.formant1 * rng.uniform(0.75, 1.3);
    const double a2 = t.formant2 * rng.uniform(0.75, 1.3), b2 = t.formant2 * rng.uniform(0.75, 1.3);
    const double attack = 0.03 * kRate, release = 0.06 * kRate;
    const std::size_t burst = static_cast<std::size_t>(rng.uniform(0.02, 0.06) * kRate);
    for (std::size_t b0 = 0; b0 < len; b0 += kBlock) {
      const double u = static_cast<double>(b0) / static_cast<double>(len);
      const double f1 = a1 + (b1 - a1) * u;
      const double f2 = a2 + (b2 - a2) * u;
      for (std::size_t h = 0; h < amps.size(); ++h) {
        amps[h] = formant_gain(f_note * static_cast<double>(h + 1), f1, f2, t.formant3) / std::sqrt(h + 1.0);
      }
      const std::size_t b1_end = std::min(len, b0 + kBlock);
      for (std::size_t i = b0; i < b1_end; ++i) {
        const double env = std::min({1.0, static_cast<double>(i) / attack, static_cast<double>(len - i) / release});
        const double f = f_note * (1.0 + t.vibrato_depth * std::sin(vib_phase));
        vib_phase += kTwoPi * t.vibrato_rate / kRate;
        double s = 0.0;
        for (std::size_t h = 0; h < amps.size(); ++h) {
          const double fh = f * static_cast<double>(h + 1);
          phase[h] += kTwoPi * fh / kRate;
          if (fh < 0.45 * kRate) s += amps[h] * std::sin(phase[h]);
        }
        double breath = 0.0;
        const double w = rng.uniform(-1.0, 1.0);
        const double hp = w - hp_prev;
        hp_prev = w;
        breath = hp * (i < burst ? 0.6 : t.breath * 0.3);
        out[pos + i] += level * t.lead_level * (env * s + breath * std::min(1.0, static_cast<double>(len - i) / release));
      }
    }
    for (double& ph : phase) ph = std::fmod(ph, kTwoPi);
    pos += len + static_cast<std::size_t>(rng.uniform(0.02, 0.25) * kRate);
  }
}

// Vibrato-free lead with a smooth spectral rolloff, phrased like the voice:
// plucked (exponentially decaying) or held notes separated by short gaps.
void add_instrument(std::vector<double>& out, const ArtistTimbre& t, double level, Rng& rng) {
  const std::size_t n = out.size();
  const bool plucked = rng.bernoulli(0.5);
  std::size_t pos = static_cast<std::size_t>(rng.uniform(0.0, 0.3) * kRate);
  std::vector<double> env;
  while (pos < n) {
    const std::size_t len = std::min(n - pos, static_cast<std::size_t>(rng.uniform(0.25, 0.9) * kRate));
    const double f = t.f0 * std::exp2(static_cast<double>(static_cast<int>(rng.below(11)) - 5) / 12.0);
    const double decay = plucked ? rng.uniform(3.0, 8.0) : 0.0;
    env.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
      env[i] = std::min({1.0, static_cast<double>(i) / (0.01 * kRate), static_cast<double>(len - i) / (0.05 * kRate)}) *
               std::exp(-decay * static_cast<double>(i) / kRate);
    }
    for (int h = 1; h <= t.partials; ++h) {
      if (f * h >= 0.45 * kRate) break;
      double ph = rng.uniform(0.0, kTwoPi);
      add_partial(out, pos, len, level * std::pow(h, -t.rolloff), f * h, ph, env);
    }
    pos += len + static_cast<std::size_t>(rng.uniform(0.02, 0.25) * kRate);
  }
}

// First-order shelf with the given gain in dB: above `corner_hz` when
// `high` is set, below it otherwise.
void apply_shelf(std::vector<double>& x, double corner_hz, double gain_db, bool high) {
  const double g = std::pow(10.0, gain_db / 20.0) - 1.0;
  const double a = std::exp(-kTwoPi * corner_hz / kRate);
  double lp = 0.0;
  for (double& v : x) {
    lp = (1.0 - a) * v + a * lp;
    v += g * (high ? v - lp : lp);
  }
}

}  // namespace

std::vector<double> synth_clip(const SynthOptions& options, std::size_t index) {
  if (options.n_vocals + options.n_nonvocals == 0 || options.n_artists == 0 || !(options.duration_s > 0.0)) {
    throw Error(ErrorKind::kConfig, "synthetic dataset needs clips, artists and a positive duration");
  }
  const ArtistTimbre timbre = make_timbre(options.seed, index % options.n_artists);
  Rng rng(mix_seed(options.seed, index));
  std::vector<double> out(static_cast<std::size_t>(options.duration_s * kRate), 0.0);
  add_bed(out, timbre, rng);
  if (rng.bernoulli(0.5)) add_percussion(out, rng);
  if (index < options.n_vocals) {
    if (rng.bernoulli(0.8)) add_instrument(out, timbre, timbre.lead_level * rng.uniform(0.5, 1.0), rng);
    add_voice(out, timbre, rng.uniform(0.6, 1.0), rng);
  } else {
    add_instrument(out, timbre, timbre.lead_level, rng);
  }
  // Singing lifts the top of the spectrum, lead instruments darken it.
  apply_shelf(out, 1500.0, index < options.n_vocals ? rng.uniform(0.0, 12.0) : rng.uniform(-12.0, 0.0), true);

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double g = rng.uniform(0.2, 0.9) / peak;
    for (double& v : out) v *= g;
  }
  return out;
}

Manifest synth_generate(const SynthOptions& options, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Manifest m;
  m.name = "synthetic";
  const std::size_t total = options.n_vocals + options.n_nonvocals;
  for (std::size_t i = 0; i < total; ++i) {
    char id[32], artist[32];
    std::snprintf(id, sizeof id, "clip%04zu", i);
    std::snprintf(artist, sizeof artist, "artist%03zu", i % options.n_artists);
    AudioClip clip{id, synth_clip(options, i), kCanonicalSampleRate};
    const auto path = dir / (std::string(id) + ".wav");
    write_wav(path, clip);
    const bool female = make_timbre(options.seed, i % options.n_artists).female;
    std::vector<std::string> tags;
    if (i < options.n_vocals) tags.push_back(female ? "female.singing" : "male.singing");
    else tags.push_back("no.singing");
    m.records.push_back({id, std::filesystem::absolute(path), artist, std::move(tags)});
  }
  std::ofstream out(dir / "manifest.tsv", std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest in " + dir.string());
  out << m.serialize(std::filesystem::absolute(dir));
  return m;
}

}  // namespace tagvalid
