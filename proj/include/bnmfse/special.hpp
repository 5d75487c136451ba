#pragma once

#include <span>

namespace bnmfse {

// Digamma for x > 0. Recurrence up to x >= 6, then the asymptotic series.
// Absolute error below 1e-12 for x >= 1e-6.
double digamma(double x);

// Trigamma for x > 0: recurrence up to x >= 10, then the asymptotic series.
double trigamma(double x);

double log_gamma(double x);

// log(x!) for nonnegative integer-valued x.
double log_factorial(double x);

// Maximum-likelihood gamma shape from the sufficient statistics
// log(mean(x)) - mean(log(x)) (which is > 0 for non-constant data).
// Solves log(a) - digamma(a) = stat by Newton iteration in log(a).
double gamma_shape_from_statistic(double stat);

// ML gamma shape for strictly positive samples; zeros are skipped.
// Returns 0 when fewer than two positive samples are present.
double fit_gamma_shape(std::span<const double> samples);

}  // namespace bnmfse
