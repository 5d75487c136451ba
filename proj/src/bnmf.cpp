#include "bnmfse/bnmf.hpp"

#include "bnmfse/mlnmf.hpp"
#include "bnmfse/special.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace bnmfse {
namespace {

constexpr double kMeanFloor = 1e-300;

Matrix digamma_of(const Matrix& x) {
  return x.unaryExpr([](double v) { return digamma(v); });
}

Matrix lgamma_of(const Matrix& x) {
  return x.unaryExpr([](double v) { return std::lgamma(v); });
}

bool all_positive_finite(const Matrix& m) {
  return m.allFinite() && (m.array() > 0.0).all();
}

// Sum over entries of E_q[log p(x)] - E_q[log q(x)] for gamma prior p and
// gamma posterior q, given E_q[x] and E_q[log x]. `prior_const` carries the
// prior-only terms -lgamma(a0) - a0 log(b0).
double gamma_bound_terms(const GammaMatrix& prior, const Matrix& prior_inv_scale,
                         double prior_const, const GammaMatrix& post, const Matrix& mean,
                         const Matrix& elog) {
  const auto a0 = prior.shape.array();
  const auto a = post.shape.array();
  const double cross = ((a0 - a) * elog.array() - mean.array() * prior_inv_scale.array()).sum();
  const double entropy = (a + lgamma_of(post.shape).array() + a * post.scale.array().log()).sum();
  return prior_const + cross + entropy;
}

double prior_constant(const GammaMatrix& prior) {
  return -(lgamma_of(prior.shape).array() + prior.shape.array() * prior.scale.array().log()).sum();
}

void require_counts(const Matrix& y, bool require_integer) {
  if (!y.allFinite()) fail(ErrorKind::kContract, "vb_infer: observations must be finite");
  if ((y.array() < 0.0).any()) fail(ErrorKind::kContract, "vb_infer: observations must be nonnegative");
  if (require_integer && (y.array() != y.array().round()).any()) {
    fail(ErrorKind::kContract, "vb_infer: observations must be integer-valued");
  }
}

}  // namespace

Matrix GammaMatrix::log_mean() const {
  return digamma_of(shape) + scale.array().log().matrix();
}

GammaMatrix GammaMatrix::with_mean(const Matrix& shape, const Matrix& mean) {
  if (shape.rows() != mean.rows() || shape.cols() != mean.cols()) {
    fail(ErrorKind::kShape, "GammaMatrix: shape and mean differ in size");
  }
  return {shape, mean.cwiseQuotient(shape)};
}

GammaMatrix GammaMatrix::constant(Index rows, Index cols, double shape, double mean) {
  return {Matrix::Constant(rows, cols, shape), Matrix::Constant(rows, cols, mean / shape)};
}

void GammaMatrix::validate(const char* what) const {
  if (shape.rows() != scale.rows() || shape.cols() != scale.cols()) {
    fail(ErrorKind::kShape, std::string(what) + ": shape/scale size mismatch");
  }
  if (!all_positive_finite(shape) || !all_positive_finite(scale)) {
    fail(ErrorKind::kContract, std::string(what) + ": gamma parameters must be positive and finite");
  }
}

BasisExpectations BasisExpectations::of(const GammaMatrix& posterior) {
  return {posterior.mean(), posterior.log_mean()};
}

BasisExpectations BasisExpectations::point(const Matrix& basis) {
  if ((basis.array() < 0.0).any()) fail(ErrorKind::kContract, "point basis must be nonnegative");
  return {basis, basis.array().log().matrix()};
}

BasisExpectations BasisExpectations::concat(const BasisExpectations& left,
                                            const BasisExpectations& right) {
  if (left.rows() != right.rows()) {
    fail(ErrorKind::kShape, "cannot concatenate bases with " + std::to_string(left.rows()) +
                                " and " + std::to_string(right.rows()) + " bins");
  }
  BasisExpectations out;
  out.mean.resize(left.rows(), left.cols() + right.cols());
  out.elog.resize(left.rows(), left.cols() + right.cols());
  out.mean << left.mean, right.mean;
  out.elog << left.elog, right.elog;
  return out;
}

VbPosterior vb_infer(const Matrix& y, const GammaMatrix& basis_prior_in,
                     const GammaMatrix& activation_prior, const VbOptions& options) {
  const Index K = y.rows();
  const Index T = y.cols();
  const Index I = activation_prior.rows();
  const Index F = options.fixed_basis ? options.fixed_basis->cols() : 0;
  const Index L = I - F;
  if (activation_prior.cols() != T) fail(ErrorKind::kShape, "vb_infer: activation prior must be I x T");
  if (F > I) fail(ErrorKind::kShape, "vb_infer: more fixed basis columns than components");
  if (options.fixed_basis && options.fixed_basis->rows() != K) {
    fail(ErrorKind::kShape, "vb_infer: fixed basis must have K rows");
  }
  if (options.max_iter < 0) fail(ErrorKind::kArgument, "vb_infer: max_iter must be >= 0");

  GammaMatrix basis_prior;
  if (L > 0) {
    if (basis_prior_in.cols() == L) {
      basis_prior = basis_prior_in;
    } else if (basis_prior_in.cols() == I) {
      basis_prior = {basis_prior_in.shape.rightCols(L), basis_prior_in.scale.rightCols(L)};
    } else {
      fail(ErrorKind::kShape, "vb_infer: basis prior must cover the learned columns");
    }
    if (basis_prior.rows() != K) fail(ErrorKind::kShape, "vb_infer: basis prior must have K rows");
    basis_prior.validate("vb_infer basis prior");
  }
  activation_prior.validate("vb_infer activation prior");
  require_counts(y, options.require_integer);

  VbPosterior post;
  post.num_fixed_columns = F;
  Matrix& Eb = post.basis_mean;
  Matrix& elogB = post.elog_basis;
  Eb.resize(K, I);
  elogB.resize(K, I);
  if (F > 0) {
    Eb.leftCols(F) = options.fixed_basis->mean;
    elogB.leftCols(F) = options.fixed_basis->elog;
  }

  GammaMatrix& qb = post.basis;
  if (L > 0) {
    Matrix mean0 = options.initial_basis_mean ? *options.initial_basis_mean : basis_prior.mean();
    if (mean0.rows() != K || mean0.cols() != L) {
      fail(ErrorKind::kShape, "vb_infer: initial basis mean must be K x learned columns");
    }
    qb = GammaMatrix::with_mean(Matrix::Constant(K, L, options.initial_shape),
                                mean0.cwiseMax(kMeanFloor));
    Eb.rightCols(L) = qb.mean();
    elogB.rightCols(L) = qb.log_mean();
  } else {
    qb = {Matrix(K, 0), Matrix(K, 0)};
  }

  GammaMatrix& qv = post.activations;
  {
    Matrix mean0 =
        options.initial_activation_mean ? *options.initial_activation_mean : activation_prior.mean();
    if (mean0.rows() != I || mean0.cols() != T) {
      fail(ErrorKind::kShape, "vb_infer: initial activation mean must be I x T");
    }
    qv = GammaMatrix::with_mean(Matrix::Constant(I, T, options.initial_shape),
                                mean0.cwiseMax(kMeanFloor));
  }
  Matrix& Ev = post.activation_mean;
  Matrix& elogV = post.elog_activations;
  Ev = qv.mean();
  elogV = qv.log_mean();

  const Matrix inv_scale_v = activation_prior.scale.cwiseInverse();
  const double const_v = prior_constant(activation_prior);
  Matrix inv_scale_b;
  double const_b = 0.0;
  if (L > 0) {
    inv_scale_b = basis_prior.scale.cwiseInverse();
    const_b = prior_constant(basis_prior);
  }
  double log_factorials = 0.0;
  for (Index t = 0; t < T; ++t) {
    for (Index k = 0; k < K; ++k) {
      if (y(k, t) > 0.0) log_factorials += log_factorial(y(k, t));
    }
  }

  Matrix Lb(K, I), Lv(I, T), S(K, T), R(K, T), SV(I, T), SB(K, I);
  Vector row_shift(K);
  Eigen::RowVectorXd col_shift(T);
  struct Cell {
    Index k, t;
  };
  std::vector<Cell> underflow;

  bool basis_dirty = true;
  auto shift_of = [](double m) { return std::isfinite(m) ? m : 0.0; };

  // Responsibilities for the current q(B), q(V); returns the collapsed bound.
  auto z_step = [&]() -> double {
    if (basis_dirty) {
      for (Index k = 0; k < K; ++k) row_shift[k] = I > 0 ? shift_of(elogB.row(k).maxCoeff()) : 0.0;
      Lb = (elogB.colwise() - row_shift).array().exp().matrix();
      basis_dirty = L > 0;  // a fixed basis needs this only once
    }
    for (Index t = 0; t < T; ++t) col_shift[t] = I > 0 ? shift_of(elogV.col(t).maxCoeff()) : 0.0;
    Lv = (elogV.rowwise() - col_shift).array().exp().matrix();
    S.noalias() = Lb * Lv;
    underflow.clear();
    double data_term = 0.0;
    for (Index t = 0; t < T; ++t) {
      for (Index k = 0; k < K; ++k) {
        const double yk = y(k, t);
        if (yk > 0.0) {
          if (S(k, t) > 0.0) {
            R(k, t) = yk / S(k, t);
            data_term += yk * (std::log(S(k, t)) + row_shift[k] + col_shift[t]);
          } else {
            R(k, t) = 0.0;
            underflow.push_back({k, t});
          }
        } else {
          R(k, t) = 0.0;
        }
      }
    }
    SV = Lv.cwiseProduct(Lb.transpose() * R);
    if (L > 0) SB = Lb.cwiseProduct(R * Lv.transpose());
    // Cells whose shifted terms all underflow: exact log-sum-exp.
    Vector terms(I);
    for (const Cell& c : underflow) {
      for (Index i = 0; i < I; ++i) terms[i] = elogB(c.k, i) + elogV(i, c.t);
      const double m = terms.maxCoeff();
      if (!std::isfinite(m)) {
        fail(ErrorKind::kNumerical, "vb_infer: no component can explain a nonzero observation");
      }
      const double lse = m + std::log((terms.array() - m).exp().sum());
      const double yk = y(c.k, c.t);
      data_term += yk * lse;
      for (Index i = 0; i < I; ++i) {
        const double z = yk * std::exp(terms[i] - lse);
        SV(i, c.t) += z;
        if (i >= F) SB(c.k, i) += z;
      }
    }
    double bound = data_term - log_factorials;
    bound -= Eb.colwise().sum().dot(Ev.rowwise().sum().transpose());
    bound += gamma_bound_terms(activation_prior, inv_scale_v, const_v, qv, Ev, elogV);
    if (L > 0) {
      bound += gamma_bound_terms(basis_prior, inv_scale_b, const_b, qb, Eb.rightCols(L),
                                 elogB.rightCols(L));
    }
    return bound;
  };

  for (int iter = 0;; ++iter) {
    const double bound = z_step();
    if (!std::isfinite(bound)) {
      fail(ErrorKind::kNumerical, "vb_infer: non-finite lower bound at iteration " + std::to_string(iter));
    }
    post.bound_trace.push_back(bound);
    if (iter > 0) {
      const double prev = post.bound_trace[post.bound_trace.size() - 2];
      if (std::abs(bound - prev) <= options.tol * std::max(std::abs(prev), 1e-300)) {
        post.converged = true;
        break;
      }
    }
    if (iter == options.max_iter) break;

    const Eigen::RowVectorXd basis_sums = Eb.colwise().sum();
    qv.shape = activation_prior.shape + SV;
    qv.scale = (inv_scale_v.colwise() + basis_sums.transpose()).cwiseInverse();
    if (!all_positive_finite(qv.shape) || !all_positive_finite(qv.scale)) {
      fail(ErrorKind::kNumerical,
           "vb_infer: non-finite activation update at iteration " + std::to_string(iter));
    }
    Ev = qv.mean();
    elogV = qv.log_mean();

    if (L > 0) {
      const Vector act_sums = Ev.bottomRows(L).rowwise().sum();
      qb.shape = basis_prior.shape + SB.rightCols(L);
      qb.scale = (inv_scale_b.rowwise() + act_sums.transpose()).cwiseInverse();
      if (!all_positive_finite(qb.shape) || !all_positive_finite(qb.scale)) {
        fail(ErrorKind::kNumerical,
             "vb_infer: non-finite basis update at iteration " + std::to_string(iter));
      }
      Eb.rightCols(L) = qb.mean();
      elogB.rightCols(L) = qb.log_mean();
    }
    post.iterations = iter + 1;
  }
  return post;
}

LatentWeights expected_latent_weights(std::span<const double> elog_basis_row,
                                      std::span<const double> elog_activation_col,
                                      Index speech_count) {
  if (elog_basis_row.size() != elog_activation_col.size()) {
    fail(ErrorKind::kShape, "expected_latent_weights: size mismatch");
  }
  const auto n = static_cast<Index>(elog_basis_row.size());
  if (speech_count < 0 || speech_count > n) {
    fail(ErrorKind::kArgument, "expected_latent_weights: speech_count out of range");
  }
  Vector terms(n);
  for (Index i = 0; i < n; ++i) {
    terms[i] = elog_basis_row[static_cast<std::size_t>(i)] +
               elog_activation_col[static_cast<std::size_t>(i)];
  }
  const double m = n > 0 ? terms.maxCoeff() : -std::numeric_limits<double>::infinity();
  if (!std::isfinite(m)) {
    fail(ErrorKind::kNumerical, "expected_latent_weights: all exponents are -inf");
  }
  LatentWeights out;
  // Scalar exp: the vectorised one turns -inf into a denormal instead of 0.
  out.weights = terms.unaryExpr([m](double t) { return std::exp(t - m); });
  out.weights /= out.weights.sum();
  out.speech_weight = std::clamp(out.weights.head(speech_count).sum(), 0.0, 1.0);
  return out;
}

Matrix expected_latent_counts(const Vector& y, const Matrix& elog_basis,
                              const Vector& elog_activations) {
  if (elog_basis.rows() != y.size() || elog_basis.cols() != elog_activations.size()) {
    fail(ErrorKind::kShape, "expected_latent_counts: inconsistent dimensions");
  }
  Matrix z = Matrix::Zero(elog_basis.rows(), elog_basis.cols());
  for (Index k = 0; k < y.size(); ++k) {
    if (y[k] <= 0.0) continue;
    const Vector row = elog_basis.row(k).transpose();
    const LatentWeights w = expected_latent_weights(
        std::span<const double>(row.data(), static_cast<std::size_t>(row.size())),
        std::span<const double>(elog_activations.data(),
                                static_cast<std::size_t>(elog_activations.size())),
        0);
    z.row(k) = y[k] * w.weights.transpose();
  }
  return z;
}

// ---------------------------------------------------------------------------
// Training

namespace {

// Optimal shared gamma prior (shape, mean) for a set of posteriors, from
// the expected sufficient statistics E[x] and E[log x].
GammaMatrix refit_prior(const Matrix& mean, const Matrix& elog) {
  const double m = mean.mean();
  const double stat = std::log(m) - elog.mean();
  const double shape = stat > 0.0 ? gamma_shape_from_statistic(stat) : 1e6;
  return GammaMatrix::constant(mean.rows(), mean.cols(), shape, m);
}

void append(std::vector<double>& dst, const std::vector<double>& src) {
  dst.insert(dst.end(), src.begin(), src.end());
}

}  // namespace

BnmfModel train_model(const MagnitudeSpectrogram& spectrogram, const TrainOptions& options,
                      TrainReport* report) {
  const Matrix& y = spectrogram.magnitudes;
  if (y.size() == 0) fail(ErrorKind::kArgument, "train_model: empty spectrogram");
  if (options.num_basis < 1) fail(ErrorKind::kArgument, "train_model: num_basis must be >= 1");
  const Index K = y.rows();
  const Index T = y.cols();
  const Index I = options.num_basis;

  KlNmfOptions init;
  init.num_basis = options.num_basis;
  init.iterations = options.init_iterations;
  init.seed = options.seed;
  const NmfFactors warm = kl_nmf(y, init);

  const double data_mean = std::max(y.mean(), 1e-12);
  GammaMatrix basis_prior =
      GammaMatrix::constant(K, I, options.basis_prior_shape, 1.0 / static_cast<double>(K));
  GammaMatrix activation_prior = GammaMatrix::constant(
      I, T, options.activation_prior_shape,
      data_mean * static_cast<double>(K) / static_cast<double>(I));

  const double basis_floor = 1e-12 / static_cast<double>(K);
  VbOptions vb;
  vb.max_iter = options.max_iter;
  vb.tol = options.tol;
  vb.initial_basis_mean = warm.basis.cwiseMax(basis_floor);
  vb.initial_activation_mean = warm.activations.cwiseMax(1e-12 * data_mean);

  TrainReport local;
  VbPosterior post = vb_infer(y, basis_prior, activation_prior, vb);
  append(local.bound_trace, post.bound_trace);

  // Re-seed collapsed columns from the worst-explained frames.
  for (int round = 0; round < 3; ++round) {
    const Eigen::RowVectorXd sums = post.basis_mean.colwise().sum();
    std::vector<double> sorted(sums.data(), sums.data() + sums.size());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(sorted.size() / 2), sorted.end());
    const double median = sorted[sorted.size() / 2];
    std::vector<Index> collapsed;
    for (Index i = 0; i < I; ++i) {
      if (sums[i] < 1e-10 * median) collapsed.push_back(i);
    }
    if (collapsed.empty()) break;

    const Matrix rate = post.rate();
    std::vector<std::pair<double, Index>> errors;
    for (Index t = 0; t < T; ++t) {
      errors.emplace_back(kl_divergence(y.col(t), rate.col(t)), t);
    }
    std::sort(errors.begin(), errors.end(), [](const auto& a, const auto& b) {
      return a.first > b.first || (a.first == b.first && a.second < b.second);
    });
    Matrix basis0 = post.basis_mean;
    Matrix act0 = post.activation_mean;
    for (std::size_t j = 0; j < collapsed.size(); ++j) {
      const Index t = errors[j % errors.size()].second;
      const Index i = collapsed[j];
      const double total = std::max(y.col(t).sum(), 1.0);
      basis0.col(i) = (y.col(t) / total).cwiseMax(basis_floor);
      act0.row(i).setConstant(data_mean * static_cast<double>(K) / static_cast<double>(I));
    }
    local.reseeded_columns += static_cast<int>(collapsed.size());
    vb.initial_basis_mean = basis0;
    vb.initial_activation_mean = act0;
    post = vb_infer(y, basis_prior, activation_prior, vb);
    append(local.bound_trace, post.bound_trace);
  }

  if (options.optimize_hyperparameters) {
    for (int round = 0; round < options.hyper_rounds; ++round) {
      activation_prior = refit_prior(post.activation_mean, post.elog_activations);
      basis_prior = refit_prior(post.basis_mean, post.elog_basis);
      vb.initial_basis_mean = post.basis_mean;
      vb.initial_activation_mean = post.activation_mean;
      post = vb_infer(y, basis_prior, activation_prior, vb);
      append(local.bound_trace, post.bound_trace);
    }
  }

  BnmfModel model;
  model.label = options.label;
  model.basis = post.basis;
  const Eigen::RowVectorXd sums = model.basis.mean().colwise().sum();
  for (Index i = 0; i < I; ++i) model.basis.scale.col(i) /= sums[i];
  model.activation_shape = post.activations.shape.mean();
  model.sample_rate = kSampleRate;
  model.frame_len = spectrogram.config.frame_len;
  const double peak = y.maxCoeff();
  model.target_max = peak > 0.0 ? peak : kDefaultTargetMax;
  if (report != nullptr) *report = std::move(local);
  return model;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(const std::string& s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  void matrix(const Matrix& m) {
    for (Index i = 0; i < m.rows(); ++i) {
      for (Index j = 0; j < m.cols(); ++j) f64(m(i, j));
    }
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return std::bit_cast<double>(v);
  }
  std::string raw(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
      for (Index j = 0; j < cols; ++j) m(i, j) = f64();
    }
    return m;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) fail(ErrorKind::kFormat, "model file is truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize_model(const BnmfModel& model) {
  ByteWriter w;
  w.raw("BNMF");
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.label.size()));
  w.raw(model.label);
  w.u32(static_cast<std::uint32_t>(model.num_bins()));
  w.u32(static_cast<std::uint32_t>(model.num_basis()));
  w.f64(model.activation_shape);
  w.matrix(model.basis.shape);
  w.matrix(model.basis.scale);
  w.u32(static_cast<std::uint32_t>(model.sample_rate));
  w.u32(static_cast<std::uint32_t>(model.frame_len));
  w.f64(model.target_max);
  return w.take();
}

BnmfModel deserialize_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.raw(4) != "BNMF") fail(ErrorKind::kFormat, "not a BNMF model file");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    fail(ErrorKind::kFormat, "unsupported model format version " + std::to_string(version));
  }
  BnmfModel model;
  const std::uint32_t label_len = r.u32();
  if (label_len > 4096) fail(ErrorKind::kFormat, "model label too long");
  model.label = r.raw(label_len);
  const auto K = static_cast<Index>(r.u32());
  const auto I = static_cast<Index>(r.u32());
  if (K == 0 || I == 0 || K > 65536 || I > 65536) fail(ErrorKind::kFormat, "bad model dimensions");
  model.activation_shape = r.f64();
  model.basis.shape = r.matrix(K, I);
  model.basis.scale = r.matrix(K, I);
  model.sample_rate = static_cast<int>(r.u32());
  model.frame_len = static_cast<int>(r.u32());
  model.target_max = r.f64();
  if (!r.done()) fail(ErrorKind::kFormat, "trailing bytes in model file");
  if (!(model.activation_shape > 0.0)) fail(ErrorKind::kFormat, "activation shape must be positive");
  if (model.frame_len / 2 + 1 != K) fail(ErrorKind::kFormat, "model K does not match its frame length");
  model.basis.validate("model basis");
  return model;
}

void save_model(const BnmfModel& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::kIo, "write failed for " + path.string());
}

BnmfModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace bnmfse
