#pragma once

#include "bnmfse/common.hpp"

#include <optional>
#include <vector>

namespace bnmfse {

// y ~= basis * activations with both factors nonnegative.
struct NmfFactors {
  Matrix basis;        // K x I
  Matrix activations;  // I x T
  std::vector<double> divergence_trace;  // D(y || bv) before the first and after each iteration
};

// Generalized KL divergence sum(y log(y/yhat) - y + yhat), with 0 log 0 = 0.
double kl_divergence(const Matrix& y, const Matrix& yhat);

struct KlNmfOptions {
  int num_basis = 1;
  int iterations = 30;
  std::uint64_t seed = 0;
  // When set, the basis is held fixed and only activations are updated.
  std::optional<Matrix> fixed_basis;
  // Warm start for the basis. The first num_fixed_columns columns are held
  // fixed; the remaining columns are learned.
  std::optional<Matrix> initial_basis;
  int num_fixed_columns = 0;
  std::optional<Matrix> initial_activations;
  bool record_trace = false;
  // Warn when more columns are learned than min(K, T). Short buffers that
  // grow over time switch this off.
  bool warn_rank = true;
};

// Multiplicative updates for KL-NMF. Learned basis columns are rescaled to
// unit L1 norm after each iteration (activations absorb the scale), which
// leaves the product and therefore the divergence unchanged.
NmfFactors kl_nmf(const Matrix& y, const KlNmfOptions& options);

// Wiener-type estimate: (Bs vs) / (Bs vs + Bn vn) * y elementwise.
// Bins with a zero denominator get gain 0.
Vector wiener_enhance(const Vector& y, const Matrix& speech_basis, const Matrix& noise_basis,
                      const Vector& speech_activations, const Vector& noise_activations);

// Per-bin gain from the two reconstructions directly.
Vector wiener_gain(const Vector& speech_part, const Vector& noise_part);

}  // namespace bnmfse
