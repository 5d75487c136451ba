#pragma once

#include "bnmfse/bnmf.hpp"
#include "bnmfse/hmm.hpp"
#include "bnmfse/online.hpp"
#include "bnmfse/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bnmfse {

// Quantizes each signal separately (gain = target_max / per-file maximum)
// and concatenates the frames.
MagnitudeSpectrogram training_spectrogram(const std::vector<AudioSignal>& signals,
                                          double target_max = kDefaultTargetMax,
                                          const StftConfig& config = {});

BnmfModel train_from_signals(const std::vector<AudioSignal>& signals, const TrainOptions& options,
                             double target_max = kDefaultTargetMax, TrainReport* report = nullptr);

// Synthetic speakers for a speaker-independent speech model.
std::vector<AudioSignal> synthetic_speech_corpus(int speakers, double seconds_each,
                                                 std::uint64_t seed);

struct ToyOptions {
  double seconds = 12.0;
  double switch_seconds = 6.0;
  double f_before = 500.0;   // fundamental of the first two-harmonic noise
  double f_after = 1250.0;   // fundamental after the switch
  double snr_db = 0.0;
  std::uint64_t seed = 7;
  int speech_rank = 40;
  int training_speakers = 6;
  double training_seconds = 6.0;
  OnlineConfig online;  // noise_rank is forced to 1

  ToyOptions();
};

struct ToyResult {
  double sdr_noisy_db = 0.0;
  double sdr_enhanced_db = 0.0;
  double sdr_improvement_db = 0.0;
  Index switch_frame = 0;
  Index latency_frames = -1;  // -1 if the error never halved
  std::vector<double> adaptation_error;  // per frame, new-noise reconstruction error
  Matrix basis_trajectory;  // K x T
  double new_peak_share = 0.0;  // basis mass near the new harmonics at the end
  double seconds_elapsed = 0.0;
  AudioSignal speech, noise, noisy, enhanced;
};

// Online learning with a single noise basis vector on speech plus a
// two-harmonic noise whose pitch jumps halfway through. The speech model is
// trained first unless one is supplied.
ToyResult run_toy(const ToyOptions& options, const BnmfModel* speech_model = nullptr);

// Frames until the KL error of reconstructing `target` (a spectrum) with the
// basis in use drops to half its value at switch_frame.
Index adaptation_latency(const std::vector<double>& errors, Index switch_frame);

// Minimum over nonnegative h of the KL divergence between target and basis h.
double basis_fit_error(const Vector& target, const Matrix& basis, int iterations = 200);

}  // namespace bnmfse
