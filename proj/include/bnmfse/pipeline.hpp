#pragma once

#include "bnmfse/config.hpp"
#include "bnmfse/hmm.hpp"

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace bnmfse {

struct EnhanceRun {
  EnhanceResult result;
  std::vector<std::string> class_labels;  // one per row of result.class_trace
  double seconds_elapsed = 0.0;
};

// Loads the models named by the config and runs the selected mode.
EnhanceRun run_enhancement(const RunConfig& config, const AudioSignal& noisy);

// Labels of the noise models; repeated labels get a numeric suffix.
std::vector<std::string> unique_labels(const std::vector<BnmfModel>& models);

// frame,time_s,<label>...  (time is the frame centre)
void write_class_trace_csv(std::ostream& out, const Matrix& trace,
                           const std::vector<std::string>& labels, const StftConfig& stft);

// frame,bin_0,...,bin_{K-1}; one row per column of `m`.
void write_columns_csv(std::ostream& out, const Matrix& m);

// frame,error
void write_series_csv(std::ostream& out, const std::string& name, const std::vector<double>& values);

// Writes through a temporary file in the same directory and renames it into
// place, so readers never see a partial file.
void write_text_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer);
void write_wav_atomic(const std::filesystem::path& path, const AudioSignal& signal);
void save_model_atomic(const BnmfModel& model, const std::filesystem::path& path);

}  // namespace bnmfse
