#pragma once

#include "bnmfse/common.hpp"

#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bnmfse {

inline constexpr double kMetricCapDb = 100.0;

struct BssEval {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
  bool degenerate = false;  // reference speech has no energy; values are NaN
};

// Energy-ratio decomposition with time-invariant projections:
// target = projection onto the speech reference, interference = projection
// onto span{speech, noise} minus target, artifacts = the rest. Ratios are
// capped at +-100 dB.
BssEval bss_eval(std::span<const double> estimate, std::span<const double> speech,
                 std::span<const double> noise);

// Mean of per-frame SNRs clamped to [-10, 30] dB over frames whose reference
// energy exceeds 1e-6 times the mean frame energy. NaN if no frame qualifies.
double segsnr(std::span<const double> estimate, std::span<const double> reference,
              int frame_len = 512, int hop = 256);

struct Mixture {
  std::vector<double> noisy;
  std::vector<double> scaled_noise;
  double noise_gain = 1.0;
};

// Scales the noise (looped or truncated to the speech length) so that the
// whole-utterance power ratio equals snr_db.
Mixture mix_at_snr(std::span<const double> speech, std::span<const double> noise, double snr_db);

// 10 log10(P_speech / P_noise) over whole signals.
double measured_snr_db(std::span<const double> speech, std::span<const double> noise);

struct WindowSdr {
  Index window = 0;
  double sdr_db = 0.0;
};

struct EvalReport {
  double sdr_db = 0.0;
  double sir_db = 0.0;
  double sar_db = 0.0;
  double segsnr_db = 0.0;
  bool degenerate = false;
  std::vector<WindowSdr> per_window;
};

// window_samples > 0 adds SDR over consecutive windows of that length.
EvalReport evaluate(std::span<const double> estimate, std::span<const double> speech,
                    std::span<const double> noise, std::size_t window_samples = 0);

struct NamedReport {
  std::string name;
  EvalReport report;
};

void write_eval_csv(std::ostream& out, const std::vector<NamedReport>& reports);
void write_window_csv(std::ostream& out, const std::vector<NamedReport>& reports);
void print_eval_table(std::ostream& out, const std::vector<NamedReport>& reports);

}  // namespace bnmfse
