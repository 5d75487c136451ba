#pragma once

#include "bnmfse/bnmf.hpp"
#include "bnmfse/common.hpp"
#include "bnmfse/hmm.hpp"
#include "bnmfse/signal.hpp"

#include <deque>
#include <vector>

namespace bnmfse {

struct BufferConfig {
  int n1 = 50;  // main buffer length
  int n2 = 15;  // local buffer length
  int q = 5;    // frames moved to the main buffer per trigger

  void validate() const;
};

// Main and local frame buffers for online noise learning. Columns are kept
// oldest to newest.
class FrameBuffers {
 public:
  FrameBuffers(Index num_bins, BufferConfig config = {});

  // Stores y in the local buffer. Once n2 new frames have arrived, the q
  // lowest-energy local frames move to the main buffer and this returns true.
  bool push(const Vector& y);

  // Appends a frame to the main buffer directly (used to bootstrap).
  void seed_main(const Vector& y);

  Matrix main() const;
  Matrix local() const;
  Index main_size() const { return static_cast<Index>(main_.size()); }
  Index local_size() const { return static_cast<Index>(local_.size()); }
  // Stream index of each main-buffer column.
  const std::deque<Index>& main_frames() const { return main_index_; }
  Index frames_pushed() const { return pushed_; }
  const BufferConfig& config() const { return config_; }

 private:
  void append_main(const Vector& y, Index frame);

  Index num_bins_;
  BufferConfig config_;
  std::deque<Vector> main_, local_;
  std::deque<Index> main_index_, local_index_;
  Index pushed_ = 0;
  int since_trigger_ = 0;
};

// Free-function form of FrameBuffers::push.
bool push_frame(FrameBuffers& buffers, const Vector& y);

struct OnlineConfig {
  BufferConfig buffers;
  int noise_rank = 30;
  double psi_flatten = 500.0;  // shape of the flattened noise-basis prior
  // The flattened prior mean is floored at prior_floor / K so that bins the
  // previous noise never used can still pick up energy.
  double prior_floor = 0.1;
  int init_iterations = 30;  // KL-NMF iterations on the main buffer
  int vb_max_iter = 100;
  double vb_tol = 1e-5;
  double noise_activation_shape = 1.0;
  std::uint64_t seed = 0;
  EnhancerConfig enhancer;

  void validate() const;
};

class OnlineLearner {
 public:
  OnlineLearner(BnmfModel speech, OnlineConfig config = {});

  bool initialized() const { return initialized_; }
  // Seeds the main buffer with the first frame and fits an initial noise basis.
  void bootstrap(const Vector& y0);
  // Pushes a frame; on a buffer trigger, updates the noise basis. Returns
  // true if the basis changed.
  bool observe(const Vector& y);
  // Re-estimates the noise basis from the main buffer. On a numerical
  // failure the previous basis is kept and a warning is emitted.
  const GammaMatrix& update_noise_basis();

  const FrameBuffers& buffers() const { return buffers_; }
  const GammaMatrix& noise_basis() const { return noise_basis_; }
  const BnmfModel& speech_model() const { return speech_; }
  const OnlineConfig& config() const { return config_; }
  StateBasis state_basis() const;
  int updates() const { return updates_; }
  int failed_updates() const { return failed_updates_; }

 private:
  BnmfModel speech_;
  OnlineConfig config_;
  BasisExpectations speech_basis_;
  FrameBuffers buffers_;
  GammaMatrix noise_basis_;
  bool initialized_ = false;
  int updates_ = 0;
  int failed_updates_ = 0;
};

// Flattened prior for the next noise-basis update: mean equal to the
// previous posterior mean (floored), shape psi.
GammaMatrix flattened_prior(const GammaMatrix& previous, double psi, double floor_mean);

// Causal enhancement with online noise learning. noise_basis_trace holds the
// mean of the first noise basis vector used at each frame.
EnhanceResult enhance_file_online(const BnmfModel& speech, const OnlineConfig& config,
                                  const AudioSignal& noisy, const FrameObserver& observer = {});

}  // namespace bnmfse
