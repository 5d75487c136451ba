#include "bnmfse/experiments.hpp"
#include "bnmfse/priors.hpp"
#include "bnmfse/synth.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace bnmfse;

namespace {

double rms(const AudioSignal& s) {
  double p = 0.0;
  for (double v : s.samples) p += v * v;
  return std::sqrt(p / static_cast<double>(s.samples.size()));
}

}  // namespace

TEST_CASE("synthetic signals are deterministic and scaled") {
  for (const std::string& n : noise_presets()) {
    const AudioSignal a = synth_noise(n, 1.0, 3), b = synth_noise(n, 1.0, 3);
    CHECK(a.samples == b.samples);
    CHECK(a.samples.size() == 16000);
    CHECK(rms(a) == doctest::Approx(0.05).epsilon(1e-6));
  }
  CHECK_THROWS_AS(synth_noise("purple", 1.0, 0), Error);
  SpeechSynthOptions o;
  o.seconds = 2.0;
  CHECK(synth_speech(o).samples == synth_speech(o).samples);
}

TEST_CASE("switching harmonic noise changes pitch at the switch") {
  const AudioSignal s = switching_harmonic_noise(2.0, 1.0, 500.0, 1250.0);
  const auto spec = stft(s.samples);
  const Matrix m = magnitude(spec);
  Index k0, k1;
  m.col(10).maxCoeff(&k0);
  m.col(m.cols() - 10).maxCoeff(&k1);
  CHECK(k0 == 16);  // 500 Hz at 31.25 Hz per bin
  CHECK(k1 == 40);
}

TEST_CASE("adaptation latency counts frames to half the switch error") {
  std::vector<double> e = {1, 1, 8, 7, 5, 4.1, 3.9, 1};
  CHECK(adaptation_latency(e, 2) == 4);
  CHECK(adaptation_latency({1, 2, 0.5, 1}, 1) == 1);
  CHECK(adaptation_latency({1, 0, 1}, 1) == 0);
  CHECK(adaptation_latency({1, 2}, 5) == -1);
  CHECK(adaptation_latency({1, 4, 4, 4}, 1) == -1);
}

TEST_CASE("long-term SNR tracker updates once per second") {
  LongTermSnrTracker t(5.0);
  std::vector<double> zeros(8000, 0.0);
  t.feed(zeros);
  CHECK(t.snr_db() == 5.0);
  t.feed(zeros);
  CHECK(t.snr_db() == kSnrClampLowDb);
  CHECK(t.samples_seen() == 16000);
  CHECK_THROWS_AS(estimate_long_term_snr(std::vector<double>(100, 0.1)), Error);
}

TEST_CASE("SNR table lookup is monotone") {
  double prev = 1e9;
  for (double a = 0.2; a < 2.0; a += 0.01) {
    const double s = snr_for_amplitude_shape(a);
    CHECK(s <= prev);
    CHECK(s >= kSnrClampLowDb);
    CHECK(s <= kSnrClampHighDb);
    prev = s;
  }
}

TEST_CASE("SNR table agrees with a Monte-Carlo fit") {
  std::mt19937_64 rng(21);
  std::gamma_distribution<double> amp(0.4, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double db : {0.0, 10.0, 20.0}) {
    const double sd = std::sqrt(0.56 / std::pow(10.0, db / 10.0));
    std::vector<double> x(2000000);
    for (double& v : x) v = amp(rng) * (sign(rng) ? 1.0 : -1.0) + sd * gauss(rng);
    CHECK(std::abs(estimate_long_term_snr(x) - db) < 0.25);
  }
}
