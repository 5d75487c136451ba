#include "bnmfse/priors.hpp"

#include "bnmfse/special.hpp"
#include "snr_table.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace bnmfse {

void AlphaCurve::validate() const {
  if (!(snr_low_db < snr_high_db)) fail(ErrorKind::kArgument, "alpha curve: snr_low must be < snr_high");
  if (alpha_low < 0.0 || alpha_low > 1.0 || alpha_high < 0.0 || alpha_high > 1.0) {
    fail(ErrorKind::kArgument, "alpha curve: alpha values must lie in [0, 1]");
  }
  if (alpha_high > alpha_low) fail(ErrorKind::kArgument, "alpha curve must be nonincreasing");
}

double alpha_for_snr(double snr_db, const AlphaCurve& curve) {
  if (!std::isfinite(snr_db)) fail(ErrorKind::kArgument, "alpha_for_snr: SNR must be finite");
  if (snr_db <= curve.snr_low_db) return curve.alpha_low;
  if (snr_db >= curve.snr_high_db) return curve.alpha_high;
  const double u = (snr_db - curve.snr_low_db) / (curve.snr_high_db - curve.snr_low_db);
  return curve.alpha_low + u * (curve.alpha_high - curve.alpha_low);
}

double snr_for_amplitude_shape(double shape) {
  const auto& table = detail::kSnrShapeTable;
  if (!(shape > 0.0) || shape >= table.front().shape) return kSnrClampLowDb;
  if (shape <= table.back().shape) return kSnrClampHighDb;
  // First entry whose shape drops to or below the fitted one.
  std::size_t i = 1;
  while (i < table.size() && table[i].shape > shape) ++i;
  const auto& a = table[i - 1];
  const auto& b = table[i];
  double snr = b.snr_db;
  if (a.shape > b.shape) {
    const double u = (a.shape - shape) / (a.shape - b.shape);
    snr = a.snr_db + u * (b.snr_db - a.snr_db);
  }
  return std::clamp(snr, kSnrClampLowDb, kSnrClampHighDb);
}

double estimate_long_term_snr(std::span<const double> noisy, int sample_rate) {
  if (noisy.size() < static_cast<std::size_t>(sample_rate)) {
    fail(ErrorKind::kLength, "long-term SNR needs at least one second of audio");
  }
  const double shape = fit_gamma_shape(noisy);
  if (shape == 0.0) return kSnrClampLowDb;
  return snr_for_amplitude_shape(shape);
}

LongTermSnrTracker::LongTermSnrTracker(double initial_snr_db, double window_seconds,
                                       double update_seconds, int sample_rate)
    : window_len_(static_cast<std::size_t>(window_seconds * sample_rate)),
      update_len_(static_cast<std::size_t>(update_seconds * sample_rate)),
      sample_rate_(sample_rate),
      snr_db_(initial_snr_db) {
  if (update_len_ == 0 || window_len_ < update_len_ ||
      update_len_ < static_cast<std::size_t>(sample_rate)) {
    fail(ErrorKind::kArgument, "SNR tracker: need window >= update >= 1 s");
  }
}

void LongTermSnrTracker::feed(std::span<const double> samples) {
  for (double s : samples) {
    window_.push_back(s);
    if (window_.size() > window_len_) window_.pop_front();
    ++seen_;
    if (++since_update_ == update_len_) {
      since_update_ = 0;
      const std::vector<double> recent(window_.begin(), window_.end());
      snr_db_ = estimate_long_term_snr(recent, sample_rate_);
    }
  }
}

Vector ActivationPriorState::shapes() const {
  Vector s(theta.size());
  s.head(speech_count).setConstant(phi_speech);
  s.tail(theta.size() - speech_count).setConstant(phi_noise);
  return s;
}

GammaMatrix ActivationPriorState::prior() const {
  const Vector s = shapes();
  return {s, theta.cwiseQuotient(s)};
}

ActivationPriorState update_activation_prior(const ActivationPriorState& state,
                                             const Vector& posterior_means) {
  if (posterior_means.size() != state.theta.size()) {
    fail(ErrorKind::kShape, "update_activation_prior: size mismatch");
  }
  if (state.alpha < 0.0 || state.alpha > 1.0) {
    fail(ErrorKind::kArgument, "update_activation_prior: alpha must lie in [0, 1]");
  }
  ActivationPriorState next = state;
  next.theta = state.alpha * state.theta + (1.0 - state.alpha) * posterior_means;
  // Keep the prior proper when a component has (numerically) vanished.
  next.theta = next.theta.cwiseMax(1e-12);
  return next;
}

}  // namespace bnmfse
