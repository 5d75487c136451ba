#pragma once

#include "bnmfse/bnmf.hpp"
#include "bnmfse/common.hpp"

#include <deque>
#include <span>

namespace bnmfse {

// Piecewise-linear, nonincreasing map from long-term SNR to the smoothing
// factor of the activation-prior recursion: strong smoothing at low SNR,
// mild smoothing at high SNR.
struct AlphaCurve {
  double snr_low_db = -5.0;
  double alpha_low = 0.98;
  double snr_high_db = 15.0;
  double alpha_high = 0.1;

  void validate() const;
};

double alpha_for_snr(double snr_db, const AlphaCurve& curve = {});

inline constexpr double kSnrClampLowDb = -10.0;
inline constexpr double kSnrClampHighDb = 35.0;

// Long-term SNR from the ML gamma shape of the waveform amplitudes, read
// off a Monte-Carlo table for gamma(0.4) speech in Gaussian noise. Needs at
// least one second of audio; silent input maps to the lower clamp.
double estimate_long_term_snr(std::span<const double> noisy, int sample_rate = kSampleRate);

// Maps a fitted amplitude shape to SNR via the table, clamped.
double snr_for_amplitude_shape(double shape);

// Recomputes the long-term SNR every `update_seconds` over the trailing
// `window_seconds` of audio fed so far.
class LongTermSnrTracker {
 public:
  explicit LongTermSnrTracker(double initial_snr_db = 5.0, double window_seconds = 10.0,
                              double update_seconds = 1.0, int sample_rate = kSampleRate);

  void feed(std::span<const double> samples);
  double snr_db() const { return snr_db_; }
  std::size_t samples_seen() const { return seen_; }

 private:
  std::deque<double> window_;
  std::size_t window_len_;
  std::size_t update_len_;
  std::size_t seen_ = 0;
  std::size_t since_update_ = 0;
  int sample_rate_;
  double snr_db_;
};

// Prior state for one set of activations: E[V_it] = theta_i and a shape
// shared per source (speech components first).
struct ActivationPriorState {
  Vector theta;
  double phi_speech = 0.01;
  double phi_noise = 1.0;
  double alpha = 0.5;
  Index speech_count = 0;

  Vector shapes() const;
  // Gamma(phi_i, theta_i / phi_i) as an I x 1 matrix.
  GammaMatrix prior() const;
};

// theta <- alpha theta + (1 - alpha) E[V | previous frame].
ActivationPriorState update_activation_prior(const ActivationPriorState& state,
                                             const Vector& posterior_means);

}  // namespace bnmfse
