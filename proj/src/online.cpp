#include "bnmfse/online.hpp"

#include "bnmfse/mlnmf.hpp"
#include "bnmfse/priors.hpp"

#include <algorithm>
#include <numeric>

namespace bnmfse {
namespace {

constexpr double kBasisFloor = 1e-12;

// Rescales each column of a gamma matrix so the column means sum to one.
void normalize_mean_columns(GammaMatrix& g) {
  const Matrix mean = g.mean();
  for (Index i = 0; i < g.cols(); ++i) {
    const double s = mean.col(i).sum();
    if (s > 0.0) g.scale.col(i) /= s;
  }
}

Matrix unit_columns(Matrix b) {
  b = b.cwiseMax(kBasisFloor);
  for (Index i = 0; i < b.cols(); ++i) b.col(i) /= b.col(i).sum();
  return b;
}

}  // namespace

void BufferConfig::validate() const {
  if (q < 1 || n2 < q || n1 < n2) fail(ErrorKind::kArgument, "buffers need n1 >= n2 >= q >= 1");
}

FrameBuffers::FrameBuffers(Index num_bins, BufferConfig config)
    : num_bins_(num_bins), config_(config) {
  config_.validate();
  if (num_bins < 1) fail(ErrorKind::kArgument, "buffers need at least one bin");
}

void FrameBuffers::append_main(const Vector& y, Index frame) {
  main_.push_back(y);
  main_index_.push_back(frame);
  while (static_cast<int>(main_.size()) > config_.n1) {
    main_.pop_front();
    main_index_.pop_front();
  }
}

void FrameBuffers::seed_main(const Vector& y) {
  if (y.size() != num_bins_) fail(ErrorKind::kShape, "buffer frame has the wrong number of bins");
  append_main(y, pushed_);
}

bool FrameBuffers::push(const Vector& y) {
  if (y.size() != num_bins_) fail(ErrorKind::kShape, "buffer frame has the wrong number of bins");
  local_.push_back(y);
  local_index_.push_back(pushed_++);
  if (static_cast<int>(local_.size()) > config_.n2) {
    local_.pop_front();
    local_index_.pop_front();
  }
  if (++since_trigger_ < config_.n2) return false;
  since_trigger_ = 0;

  std::vector<std::size_t> order(local_.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> energy(local_.size());
  for (std::size_t j = 0; j < local_.size(); ++j) energy[j] = local_[j].squaredNorm();
  // Stable sort keeps older frames first among equal energies.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return energy[a] < energy[b]; });
  order.resize(static_cast<std::size_t>(config_.q));
  std::sort(order.begin(), order.end());
  for (std::size_t j : order) append_main(local_[j], local_index_[j]);
  return true;
}

Matrix FrameBuffers::main() const {
  Matrix m(num_bins_, static_cast<Index>(main_.size()));
  for (std::size_t j = 0; j < main_.size(); ++j) m.col(static_cast<Index>(j)) = main_[j];
  return m;
}

Matrix FrameBuffers::local() const {
  Matrix m(num_bins_, static_cast<Index>(local_.size()));
  for (std::size_t j = 0; j < local_.size(); ++j) m.col(static_cast<Index>(j)) = local_[j];
  return m;
}

bool push_frame(FrameBuffers& buffers, const Vector& y) { return buffers.push(y); }

void OnlineConfig::validate() const {
  buffers.validate();
  if (noise_rank < 1) fail(ErrorKind::kArgument, "noise_rank must be >= 1");
  if (!(psi_flatten > 0.0)) fail(ErrorKind::kArgument, "psi_flatten must be > 0");
  if (!(prior_floor >= 0.0)) fail(ErrorKind::kArgument, "prior_floor must be >= 0");
  if (init_iterations < 0) fail(ErrorKind::kArgument, "init_iterations must be >= 0");
  if (vb_max_iter < 1) fail(ErrorKind::kArgument, "vb_max_iter must be >= 1");
  if (!(vb_tol > 0.0)) fail(ErrorKind::kArgument, "vb_tol must be > 0");
  if (!(noise_activation_shape > 0.0)) fail(ErrorKind::kArgument, "noise activation shape must be > 0");
  enhancer.validate();
}

GammaMatrix flattened_prior(const GammaMatrix& previous, double psi, double floor_mean) {
  const Matrix mean = previous.mean().cwiseMax(floor_mean);
  return GammaMatrix::with_mean(Matrix::Constant(mean.rows(), mean.cols(), psi), mean);
}

OnlineLearner::OnlineLearner(BnmfModel speech, OnlineConfig config)
    : speech_(std::move(speech)),
      config_(config),
      buffers_(speech_.num_bins(), config.buffers) {
  config_.validate();
  speech_.basis.validate("speech model");
  if (speech_.num_bins() != config_.enhancer.stft.num_bins()) {
    fail(ErrorKind::kShape, "speech model and STFT bin counts differ");
  }
  speech_basis_ = BasisExpectations::of(speech_.basis);
}

void OnlineLearner::bootstrap(const Vector& y0) {
  buffers_.seed_main(y0);
  const Index K = speech_.num_bins();
  const Index Is = speech_.num_basis();
  const Index In = config_.noise_rank;
  // A plain KL-NMF fit with the speech basis fixed stands in for the first
  // posterior; the flattened prior keeps it from being taken literally.
  Matrix init(K, Is + In);
  init.leftCols(Is) = speech_basis_.mean;
  init.rightCols(In).setConstant(1.0 / double(K));
  for (Index i = 0; i < In; ++i) init.col(Is + i) += y0 / std::max(y0.sum(), 1.0) * (1.0 + 0.01 * i);
  KlNmfOptions opt;
  opt.num_basis = static_cast<int>(Is + In);
  opt.iterations = config_.init_iterations;
  opt.seed = config_.seed;
  opt.initial_basis = init;
  opt.num_fixed_columns = static_cast<int>(Is);
  opt.warn_rank = false;
  const NmfFactors f = kl_nmf(y0, opt);
  const Matrix noise = unit_columns(f.basis.rightCols(In));
  noise_basis_ = GammaMatrix::with_mean(Matrix::Constant(K, In, config_.psi_flatten), noise);
  initialized_ = true;
}

bool OnlineLearner::observe(const Vector& y) {
  if (!initialized_) bootstrap(y);
  if (!buffers_.push(y)) return false;
  update_noise_basis();
  return true;
}

const GammaMatrix& OnlineLearner::update_noise_basis() {
  if (!initialized_) fail(ErrorKind::kContract, "update_noise_basis: learner not bootstrapped");
  const Matrix y = buffers_.main();
  const Index K = y.rows();
  const Index T = y.cols();
  const Index Is = speech_.num_basis();
  const Index In = config_.noise_rank;
  const Matrix previous = noise_basis_.mean();

  // Warm start, pulled toward the frames just added so that a changed noise
  // gets some basis mass the speech columns cannot claim first.
  const Index q = std::min<Index>(config_.buffers.q, T);
  Vector recent = y.rightCols(q).rowwise().sum();
  recent /= std::max(recent.sum(), 1.0);
  Matrix init(K, Is + In);
  init << speech_basis_.mean, previous + recent.replicate(1, In);
  KlNmfOptions opt;
  opt.num_basis = static_cast<int>(Is + In);
  opt.iterations = config_.init_iterations;
  opt.seed = config_.seed + static_cast<std::uint64_t>(updates_ + failed_updates_);
  opt.initial_basis = init;
  opt.num_fixed_columns = static_cast<int>(Is);
  opt.warn_rank = false;
  const NmfFactors f = kl_nmf(y, opt);

  const GammaMatrix basis_prior =
      flattened_prior(noise_basis_, config_.psi_flatten, config_.prior_floor / double(K));

  Vector shapes(Is + In);
  shapes.head(Is).setConstant(config_.enhancer.speech_activation_shape);
  shapes.tail(In).setConstant(config_.noise_activation_shape);
  const Vector row_means = f.activations.rowwise().mean().cwiseMax(kBasisFloor);
  GammaMatrix act_prior;
  act_prior.shape = shapes.replicate(1, T);
  act_prior.scale = row_means.cwiseQuotient(shapes).replicate(1, T);

  VbOptions vb;
  vb.max_iter = config_.vb_max_iter;
  vb.tol = config_.vb_tol;
  vb.fixed_basis = speech_basis_;
  vb.initial_basis_mean = unit_columns(f.basis.rightCols(In));
  vb.initial_activation_mean = f.activations.cwiseMax(kBasisFloor);
  try {
    VbPosterior post = vb_infer(y, basis_prior, act_prior, vb);
    normalize_mean_columns(post.basis);
    noise_basis_ = std::move(post.basis);
    ++updates_;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNumerical) throw;
    warn(std::string("noise basis update failed, keeping the previous basis: ") + e.what());
    ++failed_updates_;
  }
  return noise_basis_;
}

StateBasis OnlineLearner::state_basis() const {
  return StateBasis::make(speech_basis_, BasisExpectations::of(noise_basis_),
                          config_.enhancer.speech_activation_shape, config_.noise_activation_shape);
}

EnhanceResult enhance_file_online(const BnmfModel& speech, const OnlineConfig& config,
                                  const AudioSignal& noisy, const FrameObserver& observer) {
  const EnhancerConfig& ecfg = config.enhancer;
  OnlineLearner learner(speech, config);
  detail::require_input(noisy, ecfg.stft);
  detail::FrameSource source(noisy, ecfg.stft, ecfg.stream_gain);
  const Index T = source.num_frames();
  const Index K = ecfg.stft.num_bins();

  LongTermSnrTracker tracker(ecfg.initial_snr_db);
  ActivationPriorState prior;
  prior.phi_speech = ecfg.speech_activation_shape;
  prior.phi_noise = config.noise_activation_shape;
  prior.speech_count = speech.num_basis();

  EnhanceResult result;
  result.class_trace = Matrix::Ones(1, T);
  result.noise_basis_trace.resize(K, T);
  Matrix mags(K, T), phase(K, T);
  Vector y, ph;
  StateBasis sb;
  for (Index t = 0; t < T; ++t) {
    const std::size_t end = static_cast<std::size_t>(t) * ecfg.stft.hop + ecfg.stft.frame_len;
    const std::size_t begin = tracker.samples_seen();
    if (end > begin) tracker.feed(std::span<const double>(noisy.samples.data() + begin, end - begin));
    source.frame(t, y, ph);
    if (!learner.initialized()) {
      learner.bootstrap(y);
      sb = learner.state_basis();
    }
    if (prior.theta.size() == 0) prior.theta = initial_theta(y, sb.basis);
    const FrameLikelihood fl = state_likelihood(y, sb, prior.prior(), ecfg.max_iter, ecfg.tol);
    Vector s_hat = mmse_state_estimate(y, fl.posterior, sb.speech_count).cwiseMin(y);
    prior.alpha = alpha_for_snr(tracker.snr_db(), ecfg.alpha_curve);
    prior = update_activation_prior(prior, fl.posterior.activation_mean.col(0));
    if (observer) observer(t, y, s_hat);
    mags.col(t) = s_hat / ecfg.stream_gain;
    phase.col(t) = ph;
    result.noise_basis_trace.col(t) = sb.basis.mean.col(sb.speech_count);
    // The new basis takes effect from the next frame.
    if (learner.observe(y)) sb = learner.state_basis();
  }
  result.enhanced = detail::synthesize(mags, phase, ecfg.stft, noisy.samples.size());
  result.frames = T;
  result.final_snr_db = tracker.snr_db();
  return result;
}

}  // namespace bnmfse
