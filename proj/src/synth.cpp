#include "bnmfse/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

namespace bnmfse {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vowel {
  std::array<double, 3> formants;
};

constexpr std::array<Vowel, 6> kVowels = {{
    {{730.0, 1090.0, 2440.0}},
    {{270.0, 2290.0, 3010.0}},
    {{300.0, 870.0, 2240.0}},
    {{530.0, 1840.0, 2480.0}},
    {{570.0, 840.0, 2410.0}},
    {{660.0, 1720.0, 2410.0}},
}};

double formant_gain(double f, const Vowel& v) {
  constexpr std::array<double, 3> amp = {1.0, 0.6, 0.3};
  constexpr std::array<double, 3> bw = {90.0, 120.0, 170.0};
  double g = 0.01;
  for (std::size_t j = 0; j < 3; ++j) {
    const double u = (f - v.formants[j]) / bw[j];
    g += amp[j] / (1.0 + u * u);
  }
  return g / (1.0 + f / 800.0);
}

std::size_t num_samples(double seconds) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) fail(ErrorKind::kArgument, "duration must be positive");
  return static_cast<std::size_t>(std::llround(seconds * kSampleRate));
}

// Shapes white Gaussian noise by a per-bin magnitude gain in the STFT domain.
template <class Gain>
AudioSignal shaped_noise(double seconds, std::uint64_t seed, double rms, Gain gain) {
  const std::size_t n = num_samples(seconds);
  const StftConfig cfg;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  // Pad so the kept part is covered by two frames everywhere.
  const std::size_t pad = static_cast<std::size_t>(cfg.frame_len);
  std::vector<double> white(n + 2 * pad + static_cast<std::size_t>(cfg.hop));
  for (double& v : white) v = gauss(rng);
  ComplexSpectrogram spec = stft(white, cfg);
  for (Index k = 0; k < spec.num_bins(); ++k) {
    const double f = double(k) * kSampleRate / cfg.frame_len;
    spec.values.row(k) *= gain(f);
  }
  const AudioSignal full = istft(spec);
  AudioSignal out;
  out.samples.assign(full.samples.begin() + static_cast<std::ptrdiff_t>(pad),
                     full.samples.begin() + static_cast<std::ptrdiff_t>(pad + n));
  normalize_rms(out, rms);
  return out;
}

}  // namespace

void normalize_rms(AudioSignal& signal, double rms) {
  double e = 0.0;
  for (double v : signal.samples) e += v * v;
  if (e <= 0.0 || signal.samples.empty()) return;
  const double g = rms / std::sqrt(e / double(signal.samples.size()));
  for (double& v : signal.samples) v *= g;
}

AudioSignal synth_speech(const SpeechSynthOptions& options) {
  const std::size_t n = num_samples(options.seconds);
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  double f0_low = options.f0_low;
  double f0_high = options.f0_high;
  if (f0_low <= 0.0 || f0_high <= 0.0) {
    f0_low = 85.0 + 120.0 * unit(rng);
    f0_high = 1.6 * f0_low;
  }
  if (f0_high < f0_low) fail(ErrorKind::kArgument, "synth_speech: f0_high < f0_low");

  AudioSignal out;
  out.samples.assign(n, 0.0);
  double phase = 0.0;
  double prev_noise = 0.0;
  std::size_t pos = 0;
  const double fs = kSampleRate;
  while (pos < n) {
    const double r = unit(rng);
    if (r < options.pause_probability) {
      pos += static_cast<std::size_t>((0.05 + 0.2 * unit(rng)) * fs);
      continue;
    }
    const double level = 0.5 + 0.5 * unit(rng);
    if (r < options.pause_probability + options.unvoiced_probability) {
      const std::size_t len = static_cast<std::size_t>((0.05 + 0.07 * unit(rng)) * fs);
      for (std::size_t i = 0; i < len && pos + i < n; ++i) {
        const double env = std::sin(std::numbers::pi * double(i) / double(len));
        const double w = gauss(rng);
        out.samples[pos + i] = 0.3 * level * env * (w - prev_noise);
        prev_noise = w;
      }
      pos += len;
      continue;
    }
    // Voiced syllable with a gliding pitch and a fixed vowel.
    const std::size_t len = static_cast<std::size_t>((0.12 + 0.18 * unit(rng)) * fs);
    const Vowel& vowel = kVowels[static_cast<std::size_t>(unit(rng) * kVowels.size()) % kVowels.size()];
    const double f_start = f0_low + (f0_high - f0_low) * unit(rng);
    const double f_end = f_start * (0.9 + 0.2 * unit(rng));
    const int max_h = static_cast<int>(7800.0 / std::min(f_start, f_end));
    std::vector<double> gains(static_cast<std::size_t>(max_h) + 1);
    for (std::size_t i = 0; i < len && pos + i < n; ++i) {
      const double u = double(i) / double(len);
      const double f0 = f_start + (f_end - f_start) * u;
      phase += kTwoPi * f0 / fs;
      if (phase > kTwoPi) phase -= kTwoPi;
      const double env = std::pow(std::sin(std::numbers::pi * u), 2.0);
      double s = 0.0;
      for (int h = 1; h <= max_h; ++h) {
        const double f = h * f0;
        if (f > 7800.0) break;
        s += formant_gain(f, vowel) * std::sin(h * phase);
      }
      out.samples[pos + i] = level * env * s;
    }
    pos += len;
  }
  normalize_rms(out, options.rms);
  return out;
}

AudioSignal band_noise(double seconds, double low_hz, double high_hz, std::uint64_t seed, double rms) {
  if (!(low_hz >= 0.0 && high_hz > low_hz)) fail(ErrorKind::kArgument, "band_noise: invalid band");
  return shaped_noise(seconds, seed, rms,
                      [&](double f) { return (f >= low_hz && f <= high_hz) ? 1.0 : 0.0; });
}

AudioSignal colored_noise(double seconds, double exponent, std::uint64_t seed, double rms) {
  return shaped_noise(seconds, seed, rms, [&](double f) {
    return std::pow(std::max(f, 20.0) / 1000.0, -exponent / 2.0);
  });
}

AudioSignal harmonic_noise(double seconds, double f0, int harmonics, double rms) {
  if (!(f0 > 0.0) || harmonics < 1) fail(ErrorKind::kArgument, "harmonic_noise: invalid parameters");
  AudioSignal out;
  out.samples.resize(num_samples(seconds));
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    double s = 0.0;
    for (int h = 1; h <= harmonics; ++h) s += std::sin(kTwoPi * h * f0 * double(i) / kSampleRate) / h;
    out.samples[i] = s;
  }
  normalize_rms(out, rms);
  return out;
}

AudioSignal switching_harmonic_noise(double seconds, double switch_seconds, double f_a, double f_b,
                                     double rms) {
  AudioSignal out = harmonic_noise(seconds, f_a, 2, rms);
  const AudioSignal b = harmonic_noise(seconds, f_b, 2, rms);
  const std::size_t cut = std::min(out.samples.size(), num_samples(switch_seconds));
  for (std::size_t i = cut; i < out.samples.size(); ++i) out.samples[i] = b.samples[i];
  return out;
}

std::vector<std::string> noise_presets() {
  return {"white", "pink", "brown", "low", "mid", "high", "hum", "siren"};
}

AudioSignal synth_noise(const std::string& name, double seconds, std::uint64_t seed, double rms) {
  if (name == "white") return colored_noise(seconds, 0.0, seed, rms);
  if (name == "pink") return colored_noise(seconds, 1.0, seed, rms);
  if (name == "brown") return colored_noise(seconds, 2.0, seed, rms);
  if (name == "low") return band_noise(seconds, 50.0, 700.0, seed, rms);
  if (name == "mid") return band_noise(seconds, 1000.0, 2500.0, seed, rms);
  if (name == "high") return band_noise(seconds, 3500.0, 7000.0, seed, rms);
  if (name == "hum") return harmonic_noise(seconds, 150.0, 6, rms);
  if (name == "siren") {
    AudioSignal out;
    out.samples.resize(num_samples(seconds));
    double phase = 0.0;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      const double t = double(i) / kSampleRate;
      const double f = 900.0 + 400.0 * std::sin(kTwoPi * 0.5 * t);
      phase += kTwoPi * f / kSampleRate;
      out.samples[i] = std::sin(phase);
    }
    normalize_rms(out, rms);
    return out;
  }
  fail(ErrorKind::kArgument, "unknown noise preset '" + name + "'");
}

}  // namespace bnmfse
