#pragma once

#include "bnmfse/common.hpp"

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

namespace bnmfse {

struct AudioSignal {
  std::vector<double> samples;  // in [-1, 1]
  int sample_rate = kSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// 16-bit PCM mono RIFF/WAVE. Any other encoding, channel count or a rate
// other than 16 kHz is rejected.
AudioSignal read_wav(const std::filesystem::path& path);

// Samples outside [-1, 1] are saturated; returns the number of clipped
// samples (a warning is emitted when nonzero).
std::size_t write_wav(const std::filesystem::path& path, const AudioSignal& signal);

struct StftConfig {
  int frame_len = kFrameLength;
  int hop = kHopLength;

  int num_bins() const { return frame_len / 2 + 1; }
  void validate() const;
};

using ComplexMatrix = Eigen::MatrixXcd;

struct ComplexSpectrogram {
  ComplexMatrix values;  // num_bins x num_frames
  StftConfig config;
  std::size_t signal_length = 0;  // length of the analysed signal

  Index num_bins() const { return values.rows(); }
  Index num_frames() const { return values.cols(); }
};

// Magnitudes are nonnegative integers stored as doubles; divide by gain to
// return to the analysis scale.
struct MagnitudeSpectrogram {
  Matrix magnitudes;
  double gain = 1.0;
  Matrix phase;
  StftConfig config;
  std::size_t signal_length = 0;

  Index num_bins() const { return magnitudes.rows(); }
  Index num_frames() const { return magnitudes.cols(); }
};

// Periodic Hann window (sums to a constant under 50% overlap).
Vector hann_window(int length);

// Number of complete frames; incomplete trailing frames are dropped.
Index num_frames_for(std::size_t signal_length, const StftConfig& config);

ComplexSpectrogram stft(std::span<const double> signal, const StftConfig& config = {});

// Windowed overlap-add with a w^2 normalisation envelope. Where a single
// frame covers the signal (first and last hop) the envelope is floored at
// its overlap minimum. Samples not covered by any frame are zero.
AudioSignal istft(const ComplexSpectrogram& spectrogram);

// Single-frame DFT of an already windowed frame, half spectrum.
Eigen::VectorXcd frame_spectrum(std::span<const double> windowed);

MagnitudeSpectrogram quantize(const ComplexSpectrogram& spectrogram,
                              double target_max = kDefaultTargetMax);

MagnitudeSpectrogram quantize_with_gain(const ComplexSpectrogram& spectrogram, double gain);

// Rebuild a complex spectrogram from (unquantized) magnitudes and a phase
// matrix of the same shape.
ComplexSpectrogram combine(const Matrix& magnitudes, const Matrix& phase,
                           const StftConfig& config, std::size_t signal_length);

// Magnitude spectrogram of a signal on the analysis scale (no quantization).
Matrix magnitude(const ComplexSpectrogram& spectrogram);

}  // namespace bnmfse
