// Regenerates src/snr_table.cpp: the map from long-term SNR to the ML gamma
// shape of |s + n|, with |s| ~ Gamma(0.4, 1) (random sign) and Gaussian n.
// The shape solves log(a) - digamma(a) = log E|x| - E log|x|; both
// expectations are computed by quadrature, so the table is the large-sample
// limit of the estimator rather than a Monte-Carlo average.
//
//   gen_snr_table > src/snr_table.cpp

#include "bnmfse/special.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

namespace {

constexpr double kSpeechShape = 0.4;

// E log|mu + Z| for Z ~ N(0, 1). (mu + Z)^2 is noncentral chi-square with one
// degree of freedom, a Poisson(mu^2 / 2) mixture of central chi-squares with
// 1 + 2j degrees of freedom, and E log chi2_v = log 2 + digamma(v / 2).
double expected_log_abs(double mu) {
  if (mu > 30.0) {
    const double r = 1.0 / (mu * mu);
    return std::log(mu) - 0.5 * r - 0.75 * r * r;
  }
  const double lambda = 0.5 * mu * mu;
  if (lambda == 0.0) return 0.5 * (std::log(2.0) + bnmfse::digamma(0.5));
  const int last = static_cast<int>(lambda + 12.0 * std::sqrt(lambda) + 40.0);
  double acc = 0.0;
  for (int j = 0; j <= last; ++j) {
    const double w = std::exp(-lambda + j * std::log(lambda) - std::lgamma(j + 1.0));
    acc += w * bnmfse::digamma(0.5 + j);
  }
  return 0.5 * (std::log(2.0) + acc);
}

// E|s + sigma Z| for fixed s >= 0.
double expected_abs(double s, double sigma) {
  return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * s * s / (sigma * sigma)) +
         s * std::erf(s / (sigma * std::numbers::sqrt2));
}

// log E|x| - E log|x| at noise standard deviation sigma. The speech amplitude
// integral uses s = t^(1/k), which removes the s^(k-1) singularity.
double shape_statistic(double sigma) {
  const int n = 40000;
  const double t_max = std::pow(80.0, kSpeechShape);
  const double h = t_max / n;
  const double norm = 1.0 / (kSpeechShape * std::tgamma(kSpeechShape));
  double mean_abs = 0.0;
  double mean_log = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = i * h;
    const double s = std::pow(t, 1.0 / kSpeechShape);
    const double w = (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0)) * h / 3.0 * norm * std::exp(-s);
    mean_abs += w * expected_abs(s, sigma);
    mean_log += w * (std::log(sigma) + expected_log_abs(s / sigma));
  }
  return std::log(mean_abs) - mean_log;
}

}  // namespace

int main() {
  // E[s^2] for |s| ~ Gamma(k, 1) is k (k + 1).
  const double speech_power = kSpeechShape * (kSpeechShape + 1.0);
  std::vector<double> snrs;
  std::vector<double> shapes;
  for (int db = -20; db <= 45; ++db) {
    const double sigma = std::sqrt(speech_power / std::pow(10.0, db / 10.0));
    snrs.push_back(db);
    shapes.push_back(bnmfse::gamma_shape_from_statistic(shape_statistic(sigma)));
  }
  for (std::size_t i = 1; i < shapes.size(); ++i) {
    if (!(shapes[i] < shapes[i - 1])) {
      std::fprintf(stderr, "shape not decreasing at %g dB\n", snrs[i]);
      return 1;
    }
  }

  std::printf("// Generated by tools/gen_snr_table.cpp. Do not edit.\n");
  std::printf("#include \"snr_table.hpp\"\n\nnamespace bnmfse::detail {\n\n");
  std::printf("const std::array<SnrShapePoint, %zu> kSnrShapeTable = {{\n", snrs.size());
  for (std::size_t i = 0; i < snrs.size(); ++i) {
    std::printf("    {%.1f, %.10f},\n", snrs[i], shapes[i]);
  }
  std::printf("}};\n\n}  // namespace bnmfse::detail\n");
  return 0;
}
