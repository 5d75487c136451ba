#include "bnmfse/experiments.hpp"

#include "bnmfse/metrics.hpp"
#include "bnmfse/mlnmf.hpp"
#include "bnmfse/synth.hpp"

#include <chrono>
#include <cmath>

namespace bnmfse {

MagnitudeSpectrogram training_spectrogram(const std::vector<AudioSignal>& signals, double target_max,
                                          const StftConfig& config) {
  if (signals.empty()) fail(ErrorKind::kArgument, "no training signals");
  std::vector<MagnitudeSpectrogram> parts;
  Index total = 0;
  for (const AudioSignal& s : signals) {
    if (s.sample_rate != kSampleRate) {
      fail(ErrorKind::kRate, "training audio must be " + std::to_string(kSampleRate) + " Hz");
    }
    parts.push_back(quantize(stft(s.samples, config), target_max));
    total += parts.back().num_frames();
  }
  MagnitudeSpectrogram out;
  out.config = config;
  out.magnitudes.resize(config.num_bins(), total);
  out.phase.resize(config.num_bins(), total);
  Index col = 0;
  for (const MagnitudeSpectrogram& p : parts) {
    out.magnitudes.middleCols(col, p.num_frames()) = p.magnitudes;
    out.phase.middleCols(col, p.num_frames()) = p.phase;
    col += p.num_frames();
    out.signal_length += p.signal_length;
  }
  out.gain = parts.front().gain;
  return out;
}

BnmfModel train_from_signals(const std::vector<AudioSignal>& signals, const TrainOptions& options,
                             double target_max, TrainReport* report) {
  BnmfModel m = train_model(training_spectrogram(signals, target_max), options, report);
  m.target_max = target_max;
  return m;
}

std::vector<AudioSignal> synthetic_speech_corpus(int speakers, double seconds_each, std::uint64_t seed) {
  std::vector<AudioSignal> out;
  for (int i = 0; i < speakers; ++i) {
    SpeechSynthOptions o;
    o.seconds = seconds_each;
    o.seed = seed * 1000 + static_cast<std::uint64_t>(i) + 1;
    out.push_back(synth_speech(o));
  }
  return out;
}

ToyOptions::ToyOptions() { online.noise_rank = 1; }

double basis_fit_error(const Vector& target, const Matrix& basis, int iterations) {
  KlNmfOptions o;
  o.num_basis = static_cast<int>(basis.cols());
  o.iterations = iterations;
  o.fixed_basis = basis;
  const NmfFactors f = kl_nmf(target, o);
  return kl_divergence(target, f.basis * f.activations);
}

Index adaptation_latency(const std::vector<double>& errors, Index switch_frame) {
  if (switch_frame < 0 || switch_frame >= static_cast<Index>(errors.size())) return -1;
  const double half = 0.5 * errors[static_cast<std::size_t>(switch_frame)];
  for (std::size_t t = static_cast<std::size_t>(switch_frame); t < errors.size(); ++t) {
    if (errors[t] <= half) return static_cast<Index>(t) - switch_frame;
  }
  return -1;
}

ToyResult run_toy(const ToyOptions& options, const BnmfModel* speech_model) {
  const auto start = std::chrono::steady_clock::now();
  if (!(options.switch_seconds > 0.0 && options.switch_seconds < options.seconds)) {
    fail(ErrorKind::kArgument, "toy: switch time must lie inside the signal");
  }
  OnlineConfig online = options.online;
  online.noise_rank = 1;
  online.validate();
  const StftConfig& stft_cfg = online.enhancer.stft;

  BnmfModel trained;
  if (speech_model == nullptr) {
    TrainOptions t;
    t.num_basis = options.speech_rank;
    t.seed = options.seed;
    t.label = "speech";
    trained = train_from_signals(
        synthetic_speech_corpus(options.training_speakers, options.training_seconds, options.seed + 100),
        t);
    speech_model = &trained;
  }

  ToyResult r;
  SpeechSynthOptions so;
  so.seconds = options.seconds;
  so.seed = options.seed;
  r.speech = synth_speech(so);
  const AudioSignal raw_noise = switching_harmonic_noise(options.seconds, options.switch_seconds,
                                                         options.f_before, options.f_after);
  const Mixture mix = mix_at_snr(r.speech.samples, raw_noise.samples, options.snr_db);
  r.noise.samples = mix.scaled_noise;
  r.noisy.samples = mix.noisy;

  const EnhanceResult er = enhance_file_online(*speech_model, online, r.noisy);
  r.enhanced = er.enhanced;
  r.basis_trajectory = er.noise_basis_trace;
  r.sdr_noisy_db = bss_eval(r.noisy.samples, r.speech.samples, r.noise.samples).sdr_db;
  r.sdr_enhanced_db = bss_eval(r.enhanced.samples, r.speech.samples, r.noise.samples).sdr_db;
  r.sdr_improvement_db = r.sdr_enhanced_db - r.sdr_noisy_db;

  // Reference spectrum of the new noise alone, on the enhancer's count scale.
  const std::size_t cut = static_cast<std::size_t>(std::llround(options.switch_seconds * kSampleRate));
  const Index T = er.frames;
  r.switch_frame = cut <= static_cast<std::size_t>(stft_cfg.frame_len)
                       ? 0
                       : static_cast<Index>((cut - stft_cfg.frame_len) / stft_cfg.hop + 1);
  const std::vector<double> tail(r.noise.samples.begin() + static_cast<std::ptrdiff_t>(cut),
                                 r.noise.samples.end());
  const Matrix tail_mag = magnitude(stft(tail, stft_cfg)) * online.enhancer.stream_gain;
  const Vector target = tail_mag.rowwise().mean().array().round().matrix();

  r.adaptation_error.resize(static_cast<std::size_t>(T));
  for (Index t = 0; t < T; ++t) {
    // The basis only changes at buffer triggers; reuse the previous value.
    if (t > 0 && r.basis_trajectory.col(t) == r.basis_trajectory.col(t - 1)) {
      r.adaptation_error[static_cast<std::size_t>(t)] = r.adaptation_error[static_cast<std::size_t>(t - 1)];
    } else {
      r.adaptation_error[static_cast<std::size_t>(t)] = basis_fit_error(target, r.basis_trajectory.col(t));
    }
  }
  r.latency_frames = adaptation_latency(r.adaptation_error, r.switch_frame);

  // Basis mass within one bin of the new harmonics at the last frame.
  const Vector last = r.basis_trajectory.col(T - 1);
  double near = 0.0;
  for (double f : {options.f_after, 2.0 * options.f_after}) {
    const Index k = static_cast<Index>(std::llround(f * stft_cfg.frame_len / kSampleRate));
    for (Index j = std::max<Index>(0, k - 1); j <= std::min<Index>(last.size() - 1, k + 1); ++j) near += last[j];
  }
  r.new_peak_share = near / last.sum();
  r.seconds_elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace bnmfse
