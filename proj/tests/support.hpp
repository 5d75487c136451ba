#pragma once

#include "bnmfse/bnmf.hpp"
#include "bnmfse/experiments.hpp"
#include "bnmfse/mlnmf.hpp"

#include <random>

namespace bnmfse::testing {

// Speech model shared by the slower tests: 6 synthetic speakers x 6 s.
inline const BnmfModel& speech_model() {
  static const BnmfModel model = [] {
    TrainOptions t;
    t.num_basis = 40;
    t.seed = 7;
    t.label = "speech";
    return train_from_signals(synthetic_speech_corpus(6, 6.0, 107), t);
  }();
  return model;
}

inline Matrix random_counts(Index rows, Index cols, std::mt19937_64& rng, double mean = 20.0) {
  std::poisson_distribution<int> pois(mean);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = pois(rng);
  return m;
}

inline Matrix random_positive(Index rows, Index cols, std::mt19937_64& rng, double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

}  // namespace bnmfse::testing
