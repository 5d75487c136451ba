#pragma once

#include "bnmfse/common.hpp"
#include "bnmfse/signal.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bnmfse {

// Elementwise gamma distributions Gamma(shape, scale); mean = shape * scale.
struct GammaMatrix {
  Matrix shape;
  Matrix scale;

  Index rows() const { return shape.rows(); }
  Index cols() const { return shape.cols(); }

  Matrix mean() const { return shape.cwiseProduct(scale); }
  // E[log X] = digamma(shape) + log(scale)
  Matrix log_mean() const;

  static GammaMatrix with_mean(const Matrix& shape, const Matrix& mean);
  static GammaMatrix constant(Index rows, Index cols, double shape, double mean);

  // Throws kContract unless every parameter is positive and finite.
  void validate(const char* what) const;
};

// The two expectations variational Bayes needs from a basis posterior.
struct BasisExpectations {
  Matrix mean;  // E[B]
  Matrix elog;  // E[log B]

  Index rows() const { return mean.rows(); }
  Index cols() const { return mean.cols(); }

  static BasisExpectations of(const GammaMatrix& posterior);
  // A degenerate (known) basis: E[log B] = log B.
  static BasisExpectations point(const Matrix& basis);
  // Columns of `left` followed by columns of `right`.
  static BasisExpectations concat(const BasisExpectations& left, const BasisExpectations& right);
};

struct VbOptions {
  int max_iter = 200;
  double tol = 1e-5;  // relative change of the lower bound
  // Leading basis columns held fixed at these expectations. The basis prior
  // then describes only the remaining (learned) columns.
  std::optional<BasisExpectations> fixed_basis;
  std::optional<Matrix> initial_basis_mean;       // K x learned columns
  std::optional<Matrix> initial_activation_mean;  // I x T
  double initial_shape = 1.0;  // shape of the starting q-distributions
  bool require_integer = true;
};

struct VbPosterior {
  GammaMatrix basis;  // learned columns only; K x 0 when the basis is fixed
  GammaMatrix activations;
  Matrix basis_mean;  // all columns, fixed ones included
  Matrix elog_basis;
  Matrix activation_mean;
  Matrix elog_activations;
  std::vector<double> bound_trace;  // lower bound before each update and at exit
  int iterations = 0;
  bool converged = false;
  Index num_fixed_columns = 0;

  // Poisson rate at the posterior means, sum_i E[B_ki] E[V_it].
  Matrix rate() const { return basis_mean * activation_mean; }
};

// Mean-field variational Bayes for y_kt = sum_i Z_kit, Z_kit ~ Poisson(B_ki V_it)
// with gamma priors on B and V. Iterates: multinomial responsibilities for Z,
// then the activation posterior, then the learned basis posterior.
VbPosterior vb_infer(const Matrix& y, const GammaMatrix& basis_prior,
                     const GammaMatrix& activation_prior, const VbOptions& options = {});

struct LatentWeights {
  double speech_weight = 0.0;  // share of the first speech_count components
  Vector weights;              // normalised exp(E log B + E log V) over all components
};

// Share of y_kt explained by the first speech_count components, computed
// with log-sum-exp over E[log B_ki] + E[log V_it].
LatentWeights expected_latent_weights(std::span<const double> elog_basis_row,
                                      std::span<const double> elog_activation_col,
                                      Index speech_count);

// E[Z_kit] for one frame: a K x I matrix whose rows sum to y_kt.
Matrix expected_latent_counts(const Vector& y, const Matrix& elog_basis,
                              const Vector& elog_activations);

struct BnmfModel {
  std::string label;
  GammaMatrix basis;  // K x I posterior, column means normalised to unit sum
  double activation_shape = 1.0;
  int sample_rate = kSampleRate;
  int frame_len = kFrameLength;
  double target_max = kDefaultTargetMax;

  Index num_bins() const { return basis.rows(); }
  Index num_basis() const { return basis.cols(); }
};

struct TrainOptions {
  int num_basis = 60;
  std::string label = "speech";
  std::uint64_t seed = 0;
  int init_iterations = 30;  // KL-NMF warm start
  int max_iter = 200;
  double tol = 1e-5;
  double basis_prior_shape = 0.1;       // prior mean is 1/K
  double activation_prior_shape = 0.1;  // prior mean is mean(y) K / I
  bool optimize_hyperparameters = false;
  int hyper_rounds = 5;
};

struct TrainReport {
  std::vector<double> bound_trace;
  int reseeded_columns = 0;
};

BnmfModel train_model(const MagnitudeSpectrogram& spectrogram, const TrainOptions& options,
                      TrainReport* report = nullptr);

// Versioned little-endian container, magic "BNMF".
std::vector<std::uint8_t> serialize_model(const BnmfModel& model);
BnmfModel deserialize_model(std::span<const std::uint8_t> bytes);
void save_model(const BnmfModel& model, const std::filesystem::path& path);
BnmfModel load_model(const std::filesystem::path& path);

inline constexpr std::uint32_t kModelFormatVersion = 1;

}  // namespace bnmfse
