#include "bnmfse/mlnmf.hpp"

#include <cmath>
#include <random>

namespace bnmfse {
namespace {

constexpr double kFloor = 1e-12;

void normalize_columns(Matrix& basis, Matrix& activations, Index first) {
  for (Index i = first; i < basis.cols(); ++i) {
    const double norm = basis.col(i).sum();
    if (norm > 0.0) {
      basis.col(i) /= norm;
      activations.row(i) *= norm;
    }
  }
}

}  // namespace

double kl_divergence(const Matrix& y, const Matrix& yhat) {
  if (y.rows() != yhat.rows() || y.cols() != yhat.cols()) {
    fail(ErrorKind::kShape, "kl_divergence: shape mismatch");
  }
  double d = 0.0;
  for (Index t = 0; t < y.cols(); ++t) {
    for (Index k = 0; k < y.rows(); ++k) {
      const double a = y(k, t);
      const double b = yhat(k, t);
      if (a > 0.0) {
        d += a * std::log(a / std::max(b, kFloor)) - a + b;
      } else {
        d += b;
      }
    }
  }
  return std::max(d, 0.0);
}

NmfFactors kl_nmf(const Matrix& y, const KlNmfOptions& options) {
  const Index K = y.rows();
  const Index T = y.cols();
  if (options.num_basis < 1) fail(ErrorKind::kArgument, "kl_nmf: num_basis must be >= 1");
  if (options.iterations < 0) fail(ErrorKind::kArgument, "kl_nmf: iterations must be >= 0");
  if ((y.array() < 0.0).any()) fail(ErrorKind::kContract, "kl_nmf: input must be nonnegative");
  const Index I = options.num_basis;
  const Index learned = options.fixed_basis ? 0
                        : options.initial_basis ? I - options.num_fixed_columns
                                                : I;
  if (options.warn_rank && learned > std::min(K, T)) {
    warn("kl_nmf: num_basis " + std::to_string(I) + " exceeds min(K, T)");
  }

  NmfFactors f;
  if (y.size() == 0 || y.maxCoeff() <= 0.0) {
    f.basis = options.fixed_basis ? *options.fixed_basis
                                  : Matrix::Constant(K, I, 1.0 / static_cast<double>(K));
    f.activations = Matrix::Zero(I, T);
    if (options.record_trace) f.divergence_trace.push_back(0.0);
    return f;
  }

  Index fixed_cols = 0;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  const double data_mean = y.mean();

  if (options.fixed_basis) {
    f.basis = *options.fixed_basis;
    fixed_cols = I;
  } else if (options.initial_basis) {
    f.basis = *options.initial_basis;
    fixed_cols = options.num_fixed_columns;
  } else {
    f.basis = Matrix::NullaryExpr(K, I, [&] { return unit(rng); });
  }
  if (f.basis.rows() != K || f.basis.cols() != I) {
    fail(ErrorKind::kShape, "kl_nmf: basis must be K x num_basis");
  }
  if (fixed_cols < 0 || fixed_cols > I) {
    fail(ErrorKind::kArgument, "kl_nmf: num_fixed_columns out of range");
  }
  if (options.initial_activations) {
    f.activations = *options.initial_activations;
    if (f.activations.rows() != I || f.activations.cols() != T) {
      fail(ErrorKind::kShape, "kl_nmf: initial activations must be num_basis x T");
    }
  } else {
    // Scale so that the initial reconstruction matches the data mean.
    const double basis_mean = std::max(f.basis.mean(), kFloor);
    const double scale = data_mean / (static_cast<double>(I) * basis_mean);
    f.activations = Matrix::NullaryExpr(I, T, [&] { return unit(rng) * scale; });
  }
  normalize_columns(f.basis, f.activations, fixed_cols);

  Matrix ratio(K, T);
  auto update_ratio = [&] {
    ratio.noalias() = f.basis * f.activations;
    ratio = y.array() / ratio.array().max(kFloor);
  };
  if (options.record_trace) f.divergence_trace.push_back(kl_divergence(y, f.basis * f.activations));

  for (int iter = 0; iter < options.iterations; ++iter) {
    update_ratio();
    const Vector basis_sums = f.basis.colwise().sum().transpose();
    f.activations.array() *= (f.basis.transpose() * ratio).array().colwise() /
                             basis_sums.array().max(kFloor);

    if (fixed_cols < I) {
      update_ratio();
      const Index free = I - fixed_cols;
      const Vector act_sums = f.activations.bottomRows(free).rowwise().sum();
      Matrix numer = ratio * f.activations.bottomRows(free).transpose();
      f.basis.rightCols(free).array() *=
          numer.array().rowwise() / act_sums.transpose().array().max(kFloor);
      normalize_columns(f.basis, f.activations, fixed_cols);
    }
    if (options.record_trace) {
      f.divergence_trace.push_back(kl_divergence(y, f.basis * f.activations));
    }
  }
  return f;
}

Vector wiener_gain(const Vector& speech_part, const Vector& noise_part) {
  if (speech_part.size() != noise_part.size()) {
    fail(ErrorKind::kShape, "wiener_gain: size mismatch");
  }
  Vector gain(speech_part.size());
  for (Index k = 0; k < gain.size(); ++k) {
    const double denom = speech_part[k] + noise_part[k];
    gain[k] = denom > 0.0 ? std::clamp(speech_part[k] / denom, 0.0, 1.0) : 0.0;
  }
  return gain;
}

Vector wiener_enhance(const Vector& y, const Matrix& speech_basis, const Matrix& noise_basis,
                      const Vector& speech_activations, const Vector& noise_activations) {
  if (speech_basis.rows() != y.size() || noise_basis.rows() != y.size() ||
      speech_basis.cols() != speech_activations.size() ||
      noise_basis.cols() != noise_activations.size()) {
    fail(ErrorKind::kShape, "wiener_enhance: inconsistent dimensions");
  }
  const Vector speech = speech_basis * speech_activations;
  const Vector noise = noise_basis * noise_activations;
  return wiener_gain(speech, noise).cwiseProduct(y);
}

}  // namespace bnmfse
