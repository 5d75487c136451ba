#include "bnmfse/special.hpp"

#include "bnmfse/common.hpp"

#include <cmath>
#include <limits>

namespace bnmfse {

double digamma(double x) {
  if (!(x > 0.0)) {
    fail(ErrorKind::kNumerical, "digamma: argument must be positive");
  }
  if (std::isinf(x)) return x;
  double result = 0.0;
  while (x < 6.0) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number series: 1/12, 1/120, 1/252, 1/240, 1/132, 691/32760, 1/12
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 -
                                      inv2 * (1.0 / 132 -
                                              inv2 * (691.0 / 32760 -
                                                      inv2 / 12.0))))));
  return result + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0.0)) {
    fail(ErrorKind::kNumerical, "trigamma: argument must be positive");
  }
  double result = 0.0;
  // The series is truncated after x^-11, so start it further out than digamma.
  while (x < 10.0) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 + inv * (0.5 + inv * (1.0 / 6 -
                                       inv2 * (1.0 / 30 -
                                               inv2 * (1.0 / 42 -
                                                       inv2 * (1.0 / 30 -
                                                               inv2 * 5.0 / 66))))));
  return result + series;
}

double log_gamma(double x) { return std::lgamma(x); }

double log_factorial(double x) { return std::lgamma(x + 1.0); }

double gamma_shape_from_statistic(double stat) {
  if (!(stat > 0.0) || !std::isfinite(stat)) {
    fail(ErrorKind::kNumerical, "gamma shape: statistic must be positive");
  }
  // Minka's closed-form starting point, then Newton on log(a).
  double a = (3.0 - stat + std::sqrt((stat - 3.0) * (stat - 3.0) + 24.0 * stat)) /
             (12.0 * stat);
  for (int iter = 0; iter < 100; ++iter) {
    const double f = std::log(a) - digamma(a) - stat;
    // d/d(log a) of log(a) - digamma(a)
    const double df = 1.0 - a * trigamma(a);
    const double step = f / df;
    const double next = a * std::exp(-step);
    if (std::abs(next - a) <= 1e-14 * a) {
      a = next;
      break;
    }
    a = next;
  }
  return a;
}

double fit_gamma_shape(std::span<const double> samples) {
  double sum = 0.0;
  double sum_log = 0.0;
  std::size_t n = 0;
  for (double v : samples) {
    const double a = std::abs(v);
    if (a > 0.0) {
      sum += a;
      sum_log += std::log(a);
      ++n;
    }
  }
  if (n < 2) return 0.0;
  const double stat = std::log(sum / static_cast<double>(n)) - sum_log / static_cast<double>(n);
  if (!(stat > 0.0)) return std::numeric_limits<double>::infinity();
  return gamma_shape_from_statistic(stat);
}

}  // namespace bnmfse
