#include "bnmfse/signal.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace bnmfse;

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed, double sd = 0.2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bnmfse_test_" + name);
}

void write_raw_wav(const std::filesystem::path& p, int channels, int rate, int bits, int format = 1) {
  std::ofstream f(p, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { f.write(reinterpret_cast<const char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { f.write(reinterpret_cast<const char*>(&v), 2); };
  const std::uint32_t data = 8;
  f.write("RIFF", 4);
  u32(36 + data);
  f.write("WAVEfmt ", 8);
  u32(16);
  u16(static_cast<std::uint16_t>(format));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  f.write("data", 4);
  u32(data);
  for (int i = 0; i < 8; ++i) f.put(0);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::kIo;
}

}  // namespace

TEST_CASE("periodic Hann window overlaps to a constant") {
  const Vector w = hann_window(512);
  CHECK(w[0] == doctest::Approx(0.0));
  CHECK(w[256] == doctest::Approx(1.0));
  for (int n = 0; n < 256; ++n) CHECK(w[n] + w[n + 256] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("frame count drops incomplete frames") {
  const StftConfig c;
  CHECK(num_frames_for(511, c) == 0);
  CHECK(num_frames_for(512, c) == 1);
  CHECK(num_frames_for(767, c) == 1);
  CHECK(num_frames_for(768, c) == 2);
  CHECK(num_frames_for(16000, c) == (16000 - 512) / 256 + 1);
}

TEST_CASE("stft matches a direct DFT") {
  const std::vector<double> x = noise(512 + 256 * 3, 1);
  const ComplexSpectrogram s = stft(x);
  REQUIRE(s.num_bins() == 257);
  REQUIRE(s.num_frames() == 4);
  const Vector w = hann_window(512);
  for (Index t : {0, 3}) {
    for (int k : {0, 1, 17, 128, 256}) {
      std::complex<double> acc = 0.0;
      for (int n = 0; n < 512; ++n) {
        const double ang = -2.0 * std::numbers::pi * k * n / 512.0;
        acc += w[n] * x[static_cast<std::size_t>(t * 256 + n)] * std::polar(1.0, ang);
      }
      CHECK(std::abs(s.values(k, t) - acc) < 1e-10);
    }
  }
}

TEST_CASE("stft rejects short input and bad configs") {
  CHECK(kind_of([] { stft(std::vector<double>(100)); }) == ErrorKind::kLength);
  StftConfig odd;
  odd.frame_len = 511;
  CHECK_THROWS_AS(stft(std::vector<double>(2000), odd), Error);
}

TEST_CASE("istft reconstructs the interior") {
  for (std::size_t n : {std::size_t{512}, std::size_t{4000}, std::size_t{16000}}) {
    const std::vector<double> x = noise(n, n);
    const AudioSignal y = istft(stft(x));
    REQUIRE(y.samples.size() == n);
    const std::size_t covered = static_cast<std::size_t>(num_frames_for(n, {}) - 1) * 256 + 512;
    for (std::size_t i = 256; i + 256 < covered; ++i) CHECK(std::abs(y.samples[i] - x[i]) < 1e-12);
    for (std::size_t i = covered; i < n; ++i) CHECK(y.samples[i] == 0.0);
  }
}

TEST_CASE("quantization yields integers near gain * |X|") {
  const ComplexSpectrogram s = stft(noise(8000, 3));
  const MagnitudeSpectrogram q = quantize(s, 1000.0);
  CHECK(q.magnitudes.maxCoeff() == doctest::Approx(1000.0));
  CHECK((q.magnitudes.array() == q.magnitudes.array().round()).all());
  const Matrix m = magnitude(s);
  CHECK(((q.magnitudes - q.gain * m).cwiseAbs().array() <= 0.5 + 1e-9).all());
  CHECK_THROWS_AS(quantize(s, 10.0), Error);
  CHECK_THROWS_AS(quantize_with_gain(s, -1.0), Error);
}

TEST_CASE("combine inverts the magnitude/phase split") {
  const ComplexSpectrogram s = stft(noise(4000, 4));
  const MagnitudeSpectrogram q = quantize(s);
  const ComplexSpectrogram c = combine(magnitude(s), q.phase, s.config, s.signal_length);
  CHECK((c.values - s.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wav round trip is exact at 16-bit resolution") {
  AudioSignal a;
  for (int i = -32767; i < 32768; i += 7) a.samples.push_back(i / 32767.0);
  const auto p = temp_path("rt.wav");
  CHECK(write_wav(p, a) == 0);
  const AudioSignal b = read_wav(p);
  REQUIRE(b.samples.size() == a.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(b.samples[i] == a.samples[i]);
  std::filesystem::remove(p);
}

TEST_CASE("write_wav saturates and counts clipped samples") {
  AudioSignal a;
  a.samples = {0.0, 1.5, -2.0, 0.5};
  const auto p = temp_path("clip.wav");
  CHECK(write_wav(p, a) == 2);
  const AudioSignal b = read_wav(p);
  CHECK(b.samples[1] == 1.0);
  CHECK(b.samples[2] == -1.0);
  a.samples = {std::nan("")};
  CHECK(kind_of([&] { write_wav(p, a); }) == ErrorKind::kNumerical);
  std::filesystem::remove(p);
}

TEST_CASE("read_wav rejects unsupported encodings") {
  const auto p = temp_path("bad.wav");
  write_raw_wav(p, 2, 16000, 16);
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kFormat);
  write_raw_wav(p, 1, 44100, 16);
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kRate);
  write_raw_wav(p, 1, 16000, 8);
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kFormat);
  write_raw_wav(p, 1, 16000, 32, 3);
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kFormat);
  {
    std::ofstream f(p, std::ios::binary);
    f << "not a wave file at all";
  }
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kFormat);
  std::filesystem::remove(p);
  CHECK(kind_of([&] { read_wav(p); }) == ErrorKind::kIo);
}
