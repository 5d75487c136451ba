#pragma once

#include "bnmfse/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bnmfse {

// Speech-like test material: voiced syllables built from harmonic complexes
// shaped by formant resonances with syllabic amplitude modulation, mixed
// with short unvoiced bursts and pauses.
struct SpeechSynthOptions {
  double seconds = 5.0;
  std::uint64_t seed = 1;
  double f0_low = 0.0;   // 0 picks a speaker-dependent range from the seed
  double f0_high = 0.0;
  double rms = 0.05;
  double pause_probability = 0.2;
  double unvoiced_probability = 0.15;
};

AudioSignal synth_speech(const SpeechSynthOptions& options);

// Gaussian noise restricted to [low_hz, high_hz].
AudioSignal band_noise(double seconds, double low_hz, double high_hz, std::uint64_t seed,
                       double rms = 0.05);

// Gaussian noise with a 1/f^exponent power spectrum (0 white, 1 pink, 2 brown).
AudioSignal colored_noise(double seconds, double exponent, std::uint64_t seed, double rms = 0.05);

// Sum of sinusoids at f0, 2 f0, ..., harmonics f0.
AudioSignal harmonic_noise(double seconds, double f0, int harmonics, double rms = 0.05);

// Two-harmonic sinusoidal noise whose fundamental jumps from f_a to f_b at
// switch_seconds.
AudioSignal switching_harmonic_noise(double seconds, double switch_seconds, double f_a, double f_b,
                                     double rms = 0.05);

// Named presets used by the CLI and the tests: white, pink, brown, low, mid,
// high, hum, siren.
AudioSignal synth_noise(const std::string& name, double seconds, std::uint64_t seed,
                        double rms = 0.05);
std::vector<std::string> noise_presets();

// Scales to the requested RMS (no-op on silence).
void normalize_rms(AudioSignal& signal, double rms);

}  // namespace bnmfse
