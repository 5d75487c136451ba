#pragma once

#include "bnmfse/bnmf.hpp"
#include "bnmfse/common.hpp"
#include "bnmfse/priors.hpp"
#include "bnmfse/signal.hpp"

#include <functional>
#include <span>
#include <vector>

namespace bnmfse {

struct EnhancerConfig {
  double speech_activation_shape = 0.01;  // relatively flat speech prior
  // Shape of the noise activation prior. 0 takes each noise model's trained
  // shape, which grows with the count scale of the training data.
  double noise_activation_shape = 1.0;
  int max_iter = 50;                      // VB iterations per frame and state
  double tol = 1e-5;
  // Fixed quantization gain for streaming: counts = round(gain * |X|).
  double stream_gain = 4000.0;
  double transition_diagonal = 0.99;
  double classifier_smoothing = 0.95;
  AlphaCurve alpha_curve;
  double initial_snr_db = 5.0;  // used until one second has been observed
  StftConfig stft;

  void validate() const;
  double noise_shape_for(const BnmfModel& noise) const;
};

// Speech and noise basis expectations of one state, speech columns first.
struct StateBasis {
  BasisExpectations basis;
  Index speech_count = 0;
  double phi_speech = 0.01;
  double phi_noise = 1.0;

  Index num_bins() const { return basis.rows(); }
  Index num_components() const { return basis.cols(); }

  static StateBasis make(const BasisExpectations& speech, const BasisExpectations& noise,
                         double phi_speech, double phi_noise);
};

struct FrameLikelihood {
  double log_likelihood = 0.0;
  VbPosterior posterior;
};

// sum_k y_k log(rate_k) - rate_k - log(y_k!)
double poisson_log_likelihood(const Vector& y, const Vector& rate);

// VB on one frame with the state's basis held fixed, then the Poisson
// likelihood evaluated at the posterior means.
FrameLikelihood state_likelihood(const Vector& y, const StateBasis& state,
                                 const GammaMatrix& activation_prior, int max_iter = 50,
                                 double tol = 1e-5);

// E[S | x, y] = w * y with w the speech share of exp(E log B + E log V).
Vector mmse_state_estimate(const Vector& y, const VbPosterior& frame_posterior, Index speech_count);

struct ForwardState {
  Vector predictive;  // f(x_t | y_1..t-1)
  Vector posterior;   // f(x_t | y_1..t)
  double log_scale = 0.0;  // running log f(y_1..t)
  Index frames = 0;

  static ForwardState start(const Vector& initial);
};

// One step of the scaled forward recursion. The first call uses the
// initial distribution stored in `state.predictive` instead of a transition.
ForwardState forward_update(const ForwardState& state, std::span<const double> log_likelihoods,
                            const Matrix& transition);

class HmmDenoiser {
 public:
  HmmDenoiser(BnmfModel speech, std::vector<BnmfModel> noises, EnhancerConfig config = {});

  Index num_states() const { return static_cast<Index>(states_.size()); }
  Index num_bins() const { return speech_.num_bins(); }
  const StateBasis& state(Index x) const { return states_[static_cast<std::size_t>(x)]; }
  const Matrix& transition() const { return transition_; }
  const Vector& initial() const { return initial_; }
  const EnhancerConfig& config() const { return config_; }
  const BnmfModel& speech_model() const { return speech_; }
  const std::vector<BnmfModel>& noise_models() const { return noises_; }

 private:
  BnmfModel speech_;
  std::vector<BnmfModel> noises_;
  EnhancerConfig config_;
  std::vector<StateBasis> states_;
  Matrix transition_;
  Vector initial_;
};

// Mutable per-stream state of the enhancer.
struct EnhancerState {
  ForwardState forward;
  std::vector<ActivationPriorState> priors;  // one per HMM state
  Vector smoothed_class;
  double alpha = 0.5;
  Index frame = 0;
};

EnhancerState initial_enhancer_state(const HmmDenoiser& denoiser);

struct FrameResult {
  Vector s_hat;
  Vector class_posterior;  // smoothed for read-out
  Vector raw_posterior;    // f(x_t | y_1..t)
  std::vector<double> log_likelihoods;
};

// Initial prior mean when no previous posterior exists: the activation
// posterior mean of the frame under a broad prior.
Vector initial_theta(const Vector& y, const BasisExpectations& basis);

// Enhances one quantized frame and advances the forward recursion, the
// per-state prior recursions and the smoothed classifier.
FrameResult enhance_frame(const HmmDenoiser& denoiser, EnhancerState& state, const Vector& y);

using FrameObserver = std::function<void(Index frame, const Vector& y, const Vector& s_hat)>;

struct EnhanceResult {
  AudioSignal enhanced;
  Matrix class_trace;  // M x T, smoothed posteriors
  Index frames = 0;
  double final_snr_db = 0.0;
  Matrix noise_basis_trace;  // online mode: K x T mean of the first noise basis vector
};

EnhanceResult enhance_file(const HmmDenoiser& denoiser, const AudioSignal& noisy,
                           const FrameObserver& observer = {});

// Single noise model without the HMM layer; equals the M = 1 denoiser.
EnhanceResult enhance_file_supervised(const BnmfModel& speech, const BnmfModel& noise,
                                      const EnhancerConfig& config, const AudioSignal& noisy,
                                      const FrameObserver& observer = {});

// Oracle-ML baseline: KL-NMF activations on a fixed [speech | noise] basis
// and the Wiener-type gain, frame by frame.
EnhanceResult enhance_file_ml(const Matrix& speech_basis, const Matrix& noise_basis,
                              const AudioSignal& noisy, int iterations = 50,
                              const StftConfig& stft_config = {}, double stream_gain = 4000.0,
                              const FrameObserver& observer = {});

// Shared framing helpers for the streaming loops.
namespace detail {

struct FrameSource {
  const AudioSignal& signal;
  StftConfig config;
  double gain;
  Vector window;

  FrameSource(const AudioSignal& s, const StftConfig& c, double g);
  Index num_frames() const;
  // Quantized magnitude and phase of frame t.
  void frame(Index t, Vector& counts, Vector& phase) const;
};

AudioSignal synthesize(const Matrix& magnitudes, const Matrix& phase, const StftConfig& config,
                       std::size_t length);

void require_input(const AudioSignal& noisy, const StftConfig& config);

}  // namespace detail

}  // namespace bnmfse
