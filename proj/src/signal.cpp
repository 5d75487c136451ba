#include "bnmfse/signal.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <cstring>
#include <fstream>
#include <numbers>

namespace bnmfse {
namespace {

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xff));
  out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    fail(ErrorKind::kFormat, name + ": not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      fail(ErrorKind::kFormat, name + ": truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) fail(ErrorKind::kFormat, name + ": short fmt chunk");
      const std::uint16_t format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      // WAVE_FORMAT_EXTENSIBLE carries PCM in its sub-format GUID.
      bool pcm = format == 1;
      if (format == 0xFFFE && size >= 26) pcm = read_u16(bytes.data() + body + 24) == 1;
      if (!pcm) fail(ErrorKind::kFormat, name + ": only PCM encoding is supported");
      if (channels != 1) {
        fail(ErrorKind::kFormat, name + ": expected mono, found " + std::to_string(channels) +
                                     " channels");
      }
      if (bits != 16) fail(ErrorKind::kFormat, name + ": expected 16-bit samples");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) fail(ErrorKind::kFormat, name + ": data chunk before fmt chunk");
      if (rate != static_cast<std::uint32_t>(kSampleRate)) {
        fail(ErrorKind::kRate, name + ": sample rate " + std::to_string(rate) +
                                   " Hz, expected 16000 Hz");
      }
      AudioSignal signal;
      signal.sample_rate = static_cast<int>(rate);
      const std::size_t count = size / 2;
      signal.samples.resize(count);
      for (std::size_t i = 0; i < count; ++i) {
        const auto raw = static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
        signal.samples[i] = std::max(-1.0, static_cast<double>(raw) / 32767.0);
      }
      return signal;
    }
    pos = body + size + (size & 1u);
  }
  fail(ErrorKind::kFormat, name + ": no data chunk");
}

std::size_t write_wav(const std::filesystem::path& path, const AudioSignal& signal) {
  std::size_t clipped = 0;
  std::vector<unsigned char> out;
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(signal.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);
  for (double s : signal.samples) {
    if (!std::isfinite(s)) fail(ErrorKind::kNumerical, "write_wav: non-finite sample");
    if (s > 1.0 || s < -1.0) {
      ++clipped;
      s = std::clamp(s, -1.0, 1.0);
    }
    const auto v = static_cast<std::int16_t>(std::lround(s * 32767.0));
    put_u16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorKind::kIo, "cannot write " + path.string());
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorKind::kIo, "write failed for " + path.string());
  if (clipped > 0) {
    warn(path.string() + ": " + std::to_string(clipped) + " samples saturated to [-1, 1]");
  }
  return clipped;
}

void StftConfig::validate() const {
  if (frame_len < 4 || frame_len % 2 != 0) {
    fail(ErrorKind::kArgument, "frame length must be even and >= 4");
  }
  if (hop != frame_len / 2) {
    fail(ErrorKind::kArgument, "hop must be half the frame length");
  }
}

Vector hann_window(int length) {
  Vector w(length);
  for (int n = 0; n < length; ++n) {
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / length);
  }
  return w;
}

Index num_frames_for(std::size_t signal_length, const StftConfig& config) {
  const auto frame = static_cast<std::size_t>(config.frame_len);
  if (signal_length < frame) return 0;
  return static_cast<Index>((signal_length - frame) / static_cast<std::size_t>(config.hop) + 1);
}

Eigen::VectorXcd frame_spectrum(std::span<const double> windowed) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> in(windowed.begin(), windowed.end());
  std::vector<std::complex<double>> out;
  fft.fwd(out, in);
  Eigen::VectorXcd result(static_cast<Index>(windowed.size() / 2 + 1));
  for (Index k = 0; k < result.size(); ++k) result[k] = out[static_cast<std::size_t>(k)];
  return result;
}

ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& config) {
  config.validate();
  if (signal.size() < static_cast<std::size_t>(config.frame_len)) {
    fail(ErrorKind::kLength, "signal shorter than one frame (" + std::to_string(signal.size()) +
                                 " < " + std::to_string(config.frame_len) + " samples)");
  }
  const Index frames = num_frames_for(signal.size(), config);
  const Vector window = hann_window(config.frame_len);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buffer(static_cast<std::size_t>(config.frame_len));
  std::vector<std::complex<double>> out;

  ComplexSpectrogram result;
  result.config = config;
  result.signal_length = signal.size();
  result.values.resize(config.num_bins(), frames);
  for (Index t = 0; t < frames; ++t) {
    const std::size_t start = static_cast<std::size_t>(t * config.hop);
    for (int n = 0; n < config.frame_len; ++n) {
      buffer[static_cast<std::size_t>(n)] = signal[start + static_cast<std::size_t>(n)] * window[n];
    }
    fft.fwd(out, buffer);
    for (Index k = 0; k < result.values.rows(); ++k) {
      result.values(k, t) = out[static_cast<std::size_t>(k)];
    }
  }
  return result;
}

AudioSignal istft(const ComplexSpectrogram& spectrogram) {
  const StftConfig& config = spectrogram.config;
  config.validate();
  if (spectrogram.values.rows() != config.num_bins()) {
    fail(ErrorKind::kShape, "istft: spectrogram has " + std::to_string(spectrogram.values.rows()) +
                                " bins, expected " + std::to_string(config.num_bins()));
  }
  const Index frames = spectrogram.values.cols();
  const std::size_t covered =
      frames == 0 ? 0
                  : static_cast<std::size_t>((frames - 1) * config.hop + config.frame_len);
  if (covered > spectrogram.signal_length) {
    fail(ErrorKind::kShape, "istft: frame count exceeds the recorded signal length");
  }

  const Vector window = hann_window(config.frame_len);
  std::vector<double> accum(spectrogram.signal_length, 0.0);
  std::vector<double> envelope(spectrogram.signal_length, 0.0);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> half(static_cast<std::size_t>(config.num_bins()));
  std::vector<double> frame;
  for (Index t = 0; t < frames; ++t) {
    for (Index k = 0; k < config.num_bins(); ++k) {
      half[static_cast<std::size_t>(k)] = spectrogram.values(k, t);
    }
    // DC and Nyquist bins of a real frame are real.
    half.front() = {half.front().real(), 0.0};
    half.back() = {half.back().real(), 0.0};
    fft.inv(frame, half, config.frame_len);
    const std::size_t start = static_cast<std::size_t>(t * config.hop);
    for (int n = 0; n < config.frame_len; ++n) {
      const auto i = start + static_cast<std::size_t>(n);
      accum[i] += frame[static_cast<std::size_t>(n)] * window[n];
      envelope[i] += window[n] * window[n];
    }
  }

  // Near the ends only one frame contributes and the envelope goes to zero;
  // dividing by it there would blow up any modified spectrum. Floor it at
  // its smallest value where frames fully overlap.
  double floor = std::numeric_limits<double>::infinity();
  for (int n = 0; n < config.hop; ++n) {
    floor = std::min(floor, window[n] * window[n] + window[n + config.hop] * window[n + config.hop]);
  }
  AudioSignal out;
  out.samples.assign(spectrogram.signal_length, 0.0);
  for (std::size_t i = 0; i < accum.size(); ++i) {
    if (envelope[i] > 0.0) out.samples[i] = accum[i] / std::max(envelope[i], floor);
  }
  return out;
}

MagnitudeSpectrogram quantize_with_gain(const ComplexSpectrogram& spectrogram, double gain) {
  if (!(gain > 0.0) || !std::isfinite(gain)) {
    fail(ErrorKind::kArgument, "quantization gain must be positive and finite");
  }
  MagnitudeSpectrogram result;
  result.gain = gain;
  result.config = spectrogram.config;
  result.signal_length = spectrogram.signal_length;
  result.magnitudes = (spectrogram.values.cwiseAbs() * gain).array().round().matrix();
  result.phase = spectrogram.values.unaryExpr([](std::complex<double> c) { return std::arg(c); });
  return result;
}

MagnitudeSpectrogram quantize(const ComplexSpectrogram& spectrogram, double target_max) {
  if (!(target_max >= 100.0)) fail(ErrorKind::kArgument, "target_max must be >= 100");
  const double peak = spectrogram.values.size() > 0 ? spectrogram.values.cwiseAbs().maxCoeff() : 0.0;
  const double gain = peak > 0.0 ? target_max / peak : 1.0;
  return quantize_with_gain(spectrogram, gain);
}

ComplexSpectrogram combine(const Matrix& magnitudes, const Matrix& phase,
                           const StftConfig& config, std::size_t signal_length) {
  if (magnitudes.rows() != phase.rows() || magnitudes.cols() != phase.cols()) {
    fail(ErrorKind::kShape, "combine: magnitude and phase shapes differ");
  }
  ComplexSpectrogram result;
  result.config = config;
  result.signal_length = signal_length;
  result.values.resize(magnitudes.rows(), magnitudes.cols());
  for (Index t = 0; t < magnitudes.cols(); ++t) {
    for (Index k = 0; k < magnitudes.rows(); ++k) {
      result.values(k, t) = std::polar(magnitudes(k, t), phase(k, t));
    }
  }
  return result;
}

Matrix magnitude(const ComplexSpectrogram& spectrogram) { return spectrogram.values.cwiseAbs(); }

}  // namespace bnmfse
