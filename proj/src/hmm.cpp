#include "bnmfse/hmm.hpp"

#include "bnmfse/mlnmf.hpp"
#include "bnmfse/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bnmfse {
namespace {

constexpr double kThetaFloor = 1e-12;
constexpr double kInitialShape = 0.1;
constexpr int kInitKlIterations = 10;

std::span<const double> col_span(const Matrix& m, Index col) {
  return {m.data() + col * m.rows(), static_cast<std::size_t>(m.rows())};
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  return m + std::log((v.array() - m).exp().sum());
}

// Feeds the tracker every sample up to the end of frame t.
void feed_tracker(LongTermSnrTracker& tracker, const AudioSignal& signal, const StftConfig& config,
                  Index t) {
  const std::size_t end = static_cast<std::size_t>(t) * config.hop + config.frame_len;
  const std::size_t begin = tracker.samples_seen();
  if (end > begin) {
    tracker.feed(std::span<const double>(signal.samples.data() + begin, end - begin));
  }
}

}  // namespace

void EnhancerConfig::validate() const {
  if (!(speech_activation_shape > 0.0)) fail(ErrorKind::kArgument, "speech activation shape must be > 0");
  if (!(noise_activation_shape >= 0.0) || !std::isfinite(noise_activation_shape)) {
    fail(ErrorKind::kArgument, "noise activation shape must be >= 0");
  }
  if (max_iter < 1) fail(ErrorKind::kArgument, "max_iter must be >= 1");
  if (!(tol > 0.0)) fail(ErrorKind::kArgument, "tol must be > 0");
  if (!(stream_gain > 0.0) || !std::isfinite(stream_gain)) {
    fail(ErrorKind::kArgument, "stream gain must be positive");
  }
  if (!(transition_diagonal > 0.0 && transition_diagonal <= 1.0)) {
    fail(ErrorKind::kArgument, "transition diagonal must lie in (0, 1]");
  }
  if (!(classifier_smoothing >= 0.0 && classifier_smoothing < 1.0)) {
    fail(ErrorKind::kArgument, "classifier smoothing must lie in [0, 1)");
  }
  if (!std::isfinite(initial_snr_db)) fail(ErrorKind::kArgument, "initial SNR must be finite");
  alpha_curve.validate();
  stft.validate();
}

double EnhancerConfig::noise_shape_for(const BnmfModel& noise) const {
  return noise_activation_shape > 0.0 ? noise_activation_shape : noise.activation_shape;
}

StateBasis StateBasis::make(const BasisExpectations& speech, const BasisExpectations& noise,
                            double phi_speech, double phi_noise) {
  StateBasis s;
  s.basis = BasisExpectations::concat(speech, noise);
  s.speech_count = speech.cols();
  s.phi_speech = phi_speech;
  s.phi_noise = phi_noise;
  return s;
}

double poisson_log_likelihood(const Vector& y, const Vector& rate) {
  if (y.size() != rate.size()) fail(ErrorKind::kShape, "poisson_log_likelihood: size mismatch");
  double ll = 0.0;
  for (Index k = 0; k < y.size(); ++k) {
    const double lambda = rate[k];
    if (y[k] > 0.0) {
      if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
      ll += y[k] * std::log(lambda) - log_factorial(y[k]);
    }
    ll -= lambda;
  }
  return ll;
}

FrameLikelihood state_likelihood(const Vector& y, const StateBasis& state,
                                 const GammaMatrix& activation_prior, int max_iter, double tol) {
  if (y.size() != state.num_bins()) {
    fail(ErrorKind::kShape, "state_likelihood: frame has " + std::to_string(y.size()) +
                                " bins, model has " + std::to_string(state.num_bins()));
  }
  if (activation_prior.rows() != state.num_components() || activation_prior.cols() != 1) {
    fail(ErrorKind::kShape, "state_likelihood: activation prior must be I x 1");
  }
  VbOptions opt;
  opt.max_iter = max_iter;
  opt.tol = tol;
  opt.fixed_basis = state.basis;
  // A few KL-NMF steps from a flat start give the posterior means a starting
  // point that does not inherit components the prior has driven to ~0.
  KlNmfOptions init;
  init.num_basis = static_cast<int>(state.num_components());
  init.iterations = kInitKlIterations;
  init.fixed_basis = state.basis.mean;
  init.initial_activations =
      Matrix::Constant(state.num_components(), 1, std::max(y.sum(), 1.0) / double(state.num_components()));
  opt.initial_activation_mean = kl_nmf(y, init).activations.cwiseMax(1e-12);
  const GammaMatrix no_learned{Matrix(y.size(), 0), Matrix(y.size(), 0)};
  FrameLikelihood out;
  out.posterior = vb_infer(y, no_learned, activation_prior, opt);
  const Vector rate = out.posterior.rate().col(0);
  out.log_likelihood = poisson_log_likelihood(y, rate);
  return out;
}

Vector mmse_state_estimate(const Vector& y, const VbPosterior& post, Index speech_count) {
  const Matrix& elog_b = post.elog_basis;
  if (elog_b.rows() != y.size() || post.elog_activations.cols() < 1) {
    fail(ErrorKind::kShape, "mmse_state_estimate: posterior does not match the frame");
  }
  const Index I = elog_b.cols();
  Vector s = Vector::Zero(y.size());
  if (speech_count == I) return y;
  std::vector<double> row(static_cast<std::size_t>(I));
  const auto act = col_span(post.elog_activations, 0);
  for (Index k = 0; k < y.size(); ++k) {
    if (y[k] <= 0.0) continue;
    for (Index i = 0; i < I; ++i) row[static_cast<std::size_t>(i)] = elog_b(k, i);
    s[k] = expected_latent_weights(row, act, speech_count).speech_weight * y[k];
  }
  return s;
}

ForwardState ForwardState::start(const Vector& initial) {
  ForwardState s;
  s.predictive = initial;
  s.posterior = initial;
  return s;
}

ForwardState forward_update(const ForwardState& state, std::span<const double> log_likelihoods,
                            const Matrix& transition) {
  const Index M = state.posterior.size();
  if (static_cast<Index>(log_likelihoods.size()) != M || transition.rows() != M ||
      transition.cols() != M) {
    fail(ErrorKind::kShape, "forward_update: inconsistent number of states");
  }
  ForwardState next;
  next.frames = state.frames + 1;
  if (state.frames == 0) {
    next.predictive = state.predictive;
  } else {
    next.predictive = transition.transpose() * state.posterior;
    next.predictive /= next.predictive.sum();
  }
  Vector log_joint(M);
  for (Index x = 0; x < M; ++x) {
    log_joint[x] = std::log(next.predictive[x]) + log_likelihoods[static_cast<std::size_t>(x)];
  }
  const double lse = log_sum_exp(log_joint);
  if (!std::isfinite(lse)) {
    fail(ErrorKind::kNumerical, "forward_update: no state explains frame " + std::to_string(state.frames));
  }
  next.posterior = (log_joint.array() - lse).exp().matrix();
  next.posterior /= next.posterior.sum();
  next.log_scale = state.log_scale + lse;
  return next;
}

HmmDenoiser::HmmDenoiser(BnmfModel speech, std::vector<BnmfModel> noises, EnhancerConfig config)
    : speech_(std::move(speech)), noises_(std::move(noises)), config_(config) {
  config_.validate();
  if (noises_.empty()) fail(ErrorKind::kArgument, "HMM denoiser needs at least one noise model");
  speech_.basis.validate("speech model");
  if (speech_.num_bins() != config_.stft.num_bins()) {
    fail(ErrorKind::kShape, "speech model has " + std::to_string(speech_.num_bins()) +
                                " bins, STFT gives " + std::to_string(config_.stft.num_bins()));
  }
  const BasisExpectations speech_basis = BasisExpectations::of(speech_.basis);
  for (const BnmfModel& n : noises_) {
    n.basis.validate("noise model");
    if (n.num_bins() != speech_.num_bins()) {
      fail(ErrorKind::kShape, "noise model '" + n.label + "' has " + std::to_string(n.num_bins()) +
                                  " bins, speech model has " + std::to_string(speech_.num_bins()));
    }
    states_.push_back(StateBasis::make(speech_basis, BasisExpectations::of(n.basis),
                                       config_.speech_activation_shape, config_.noise_shape_for(n)));
  }
  const Index M = num_states();
  if (M == 1) {
    transition_ = Matrix::Ones(1, 1);
  } else {
    transition_ = Matrix::Constant(M, M, (1.0 - config_.transition_diagonal) / double(M - 1));
    transition_.diagonal().setConstant(config_.transition_diagonal);
  }
  initial_ = Vector::Constant(M, 1.0 / double(M));
}

EnhancerState initial_enhancer_state(const HmmDenoiser& denoiser) {
  EnhancerState s;
  s.forward = ForwardState::start(denoiser.initial());
  s.alpha = alpha_for_snr(denoiser.config().initial_snr_db, denoiser.config().alpha_curve);
  for (Index x = 0; x < denoiser.num_states(); ++x) {
    ActivationPriorState p;
    p.phi_speech = denoiser.state(x).phi_speech;
    p.phi_noise = denoiser.state(x).phi_noise;
    p.speech_count = denoiser.state(x).speech_count;
    p.alpha = s.alpha;
    s.priors.push_back(p);
  }
  return s;
}

Vector initial_theta(const Vector& y, const BasisExpectations& basis) {
  const double total = std::max(y.sum(), 1.0);
  const double mass = basis.mean.sum();
  if (!(mass > 0.0)) fail(ErrorKind::kNumerical, "initial_theta: basis has no mass");
  // Posterior means of the first frame under a broad prior.
  const GammaMatrix broad =
      GammaMatrix::constant(basis.cols(), 1, kInitialShape, std::max(total / mass, kThetaFloor));
  VbOptions opt;
  opt.max_iter = 50;
  opt.fixed_basis = basis;
  const GammaMatrix no_learned{Matrix(y.size(), 0), Matrix(y.size(), 0)};
  const VbPosterior post = vb_infer(y.array().round().matrix(), no_learned, broad, opt);
  return post.activation_mean.col(0).cwiseMax(kThetaFloor);
}

FrameResult enhance_frame(const HmmDenoiser& denoiser, EnhancerState& state, const Vector& y) {
  const Index M = denoiser.num_states();
  const EnhancerConfig& cfg = denoiser.config();
  FrameResult out;
  out.log_likelihoods.resize(static_cast<std::size_t>(M));
  std::vector<VbPosterior> posts;
  posts.reserve(static_cast<std::size_t>(M));
  for (Index x = 0; x < M; ++x) {
    const StateBasis& sb = denoiser.state(x);
    ActivationPriorState& prior = state.priors[static_cast<std::size_t>(x)];
    if (prior.theta.size() == 0) prior.theta = initial_theta(y, sb.basis);
    FrameLikelihood fl = state_likelihood(y, sb, prior.prior(), cfg.max_iter, cfg.tol);
    out.log_likelihoods[static_cast<std::size_t>(x)] = fl.log_likelihood;
    posts.push_back(std::move(fl.posterior));
  }
  state.forward = forward_update(state.forward, out.log_likelihoods, denoiser.transition());
  out.raw_posterior = state.forward.posterior;

  out.s_hat = Vector::Zero(y.size());
  for (Index x = 0; x < M; ++x) {
    const double p = out.raw_posterior[x];
    if (p == 0.0) continue;
    out.s_hat += p * mmse_state_estimate(y, posts[static_cast<std::size_t>(x)],
                                         denoiser.state(x).speech_count);
  }
  out.s_hat = out.s_hat.cwiseMin(y);

  for (Index x = 0; x < M; ++x) {
    ActivationPriorState& prior = state.priors[static_cast<std::size_t>(x)];
    prior.alpha = state.alpha;
    prior = update_activation_prior(prior, posts[static_cast<std::size_t>(x)].activation_mean.col(0));
  }

  if (state.frame == 0) {
    state.smoothed_class = out.raw_posterior;
  } else {
    const double c = cfg.classifier_smoothing;
    state.smoothed_class = c * state.smoothed_class + (1.0 - c) * out.raw_posterior;
    state.smoothed_class /= state.smoothed_class.sum();
  }
  out.class_posterior = state.smoothed_class;
  ++state.frame;
  return out;
}

namespace detail {

FrameSource::FrameSource(const AudioSignal& s, const StftConfig& c, double g)
    : signal(s), config(c), gain(g), window(hann_window(c.frame_len)) {}

Index FrameSource::num_frames() const { return num_frames_for(signal.samples.size(), config); }

void FrameSource::frame(Index t, Vector& counts, Vector& phase) const {
  std::vector<double> buf(static_cast<std::size_t>(config.frame_len));
  const std::size_t start = static_cast<std::size_t>(t) * config.hop;
  for (int n = 0; n < config.frame_len; ++n) {
    buf[static_cast<std::size_t>(n)] = signal.samples[start + static_cast<std::size_t>(n)] * window[n];
  }
  const Eigen::VectorXcd spec = frame_spectrum(buf);
  counts.resize(spec.size());
  phase.resize(spec.size());
  for (Index k = 0; k < spec.size(); ++k) {
    counts[k] = std::round(gain * std::abs(spec[k]));
    phase[k] = std::arg(spec[k]);
  }
}

AudioSignal synthesize(const Matrix& magnitudes, const Matrix& phase, const StftConfig& config,
                       std::size_t length) {
  return istft(combine(magnitudes, phase, config, length));
}

void require_input(const AudioSignal& noisy, const StftConfig& config) {
  if (noisy.sample_rate != kSampleRate) {
    fail(ErrorKind::kRate, "input sample rate is " + std::to_string(noisy.sample_rate) + " Hz, expected " +
                               std::to_string(kSampleRate));
  }
  if (noisy.samples.size() < static_cast<std::size_t>(config.frame_len)) {
    fail(ErrorKind::kLength, "input is shorter than one frame");
  }
}

}  // namespace detail

EnhanceResult enhance_file(const HmmDenoiser& denoiser, const AudioSignal& noisy,
                           const FrameObserver& observer) {
  const EnhancerConfig& cfg = denoiser.config();
  detail::require_input(noisy, cfg.stft);
  detail::FrameSource source(noisy, cfg.stft, cfg.stream_gain);
  const Index T = source.num_frames();
  const Index K = cfg.stft.num_bins();

  EnhancerState state = initial_enhancer_state(denoiser);
  LongTermSnrTracker tracker(cfg.initial_snr_db);
  Matrix mags(K, T), phase(K, T);
  EnhanceResult result;
  result.class_trace.resize(denoiser.num_states(), T);
  Vector y, ph;
  for (Index t = 0; t < T; ++t) {
    feed_tracker(tracker, noisy, cfg.stft, t);
    state.alpha = alpha_for_snr(tracker.snr_db(), cfg.alpha_curve);
    source.frame(t, y, ph);
    const FrameResult fr = enhance_frame(denoiser, state, y);
    if (observer) observer(t, y, fr.s_hat);
    mags.col(t) = fr.s_hat / cfg.stream_gain;
    phase.col(t) = ph;
    result.class_trace.col(t) = fr.class_posterior;
  }
  result.enhanced = detail::synthesize(mags, phase, cfg.stft, noisy.samples.size());
  result.frames = T;
  result.final_snr_db = tracker.snr_db();
  return result;
}

EnhanceResult enhance_file_supervised(const BnmfModel& speech, const BnmfModel& noise,
                                      const EnhancerConfig& config, const AudioSignal& noisy,
                                      const FrameObserver& observer) {
  config.validate();
  detail::require_input(noisy, config.stft);
  if (speech.num_bins() != config.stft.num_bins() || noise.num_bins() != speech.num_bins()) {
    fail(ErrorKind::kShape, "supervised enhancer: model and STFT bin counts differ");
  }
  speech.basis.validate("speech model");
  noise.basis.validate("noise model");
  const StateBasis sb = StateBasis::make(BasisExpectations::of(speech.basis),
                                         BasisExpectations::of(noise.basis),
                                         config.speech_activation_shape, config.noise_shape_for(noise));
  detail::FrameSource source(noisy, config.stft, config.stream_gain);
  const Index T = source.num_frames();
  const Index K = config.stft.num_bins();

  ActivationPriorState prior;
  prior.phi_speech = sb.phi_speech;
  prior.phi_noise = sb.phi_noise;
  prior.speech_count = sb.speech_count;
  LongTermSnrTracker tracker(config.initial_snr_db);
  Matrix mags(K, T), phase(K, T);
  EnhanceResult result;
  result.class_trace = Matrix::Ones(1, T);
  Vector y, ph;
  for (Index t = 0; t < T; ++t) {
    feed_tracker(tracker, noisy, config.stft, t);
    const double alpha = alpha_for_snr(tracker.snr_db(), config.alpha_curve);
    source.frame(t, y, ph);
    if (prior.theta.size() == 0) prior.theta = initial_theta(y, sb.basis);
    const FrameLikelihood fl = state_likelihood(y, sb, prior.prior(), config.max_iter, config.tol);
    Vector s_hat = mmse_state_estimate(y, fl.posterior, sb.speech_count);
    s_hat = s_hat.cwiseMin(y);
    prior.alpha = alpha;
    prior = update_activation_prior(prior, fl.posterior.activation_mean.col(0));
    if (observer) observer(t, y, s_hat);
    mags.col(t) = s_hat / config.stream_gain;
    phase.col(t) = ph;
  }
  result.enhanced = detail::synthesize(mags, phase, config.stft, noisy.samples.size());
  result.frames = T;
  result.final_snr_db = tracker.snr_db();
  return result;
}

EnhanceResult enhance_file_ml(const Matrix& speech_basis, const Matrix& noise_basis,
                              const AudioSignal& noisy, int iterations,
                              const StftConfig& stft_config, double stream_gain,
                              const FrameObserver& observer) {
  stft_config.validate();
  detail::require_input(noisy, stft_config);
  const Index K = stft_config.num_bins();
  if (speech_basis.rows() != K || noise_basis.rows() != K) {
    fail(ErrorKind::kShape, "ML enhancer: basis and STFT bin counts differ");
  }
  if (iterations < 1) fail(ErrorKind::kArgument, "ML enhancer: iterations must be >= 1");
  const Index Is = speech_basis.cols();
  Matrix basis(K, Is + noise_basis.cols());
  basis << speech_basis, noise_basis;

  detail::FrameSource source(noisy, stft_config, stream_gain);
  const Index T = source.num_frames();
  Matrix mags(K, T), phase(K, T);
  Vector y, ph;
  KlNmfOptions opt;
  opt.num_basis = static_cast<int>(basis.cols());
  opt.iterations = iterations;
  opt.fixed_basis = basis;
  for (Index t = 0; t < T; ++t) {
    source.frame(t, y, ph);
    const NmfFactors f = kl_nmf(y, opt);
    const Vector v = f.activations.col(0);
    const Vector s_hat = wiener_enhance(y, speech_basis, noise_basis, v.head(Is), v.tail(v.size() - Is));
    if (observer) observer(t, y, s_hat);
    mags.col(t) = s_hat / stream_gain;
    phase.col(t) = ph;
  }
  EnhanceResult result;
  result.enhanced = detail::synthesize(mags, phase, stft_config, noisy.samples.size());
  result.class_trace = Matrix::Ones(1, T);
  result.frames = T;
  return result;
}

}  // namespace bnmfse
