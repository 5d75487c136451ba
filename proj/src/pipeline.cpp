#include "bnmfse/pipeline.hpp"

#include "bnmfse/online.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <system_error>

namespace bnmfse {
namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  return tmp;
}

void commit(const std::filesystem::path& tmp, const std::filesystem::path& path) {
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::kIo, "cannot move output into place: " + path.string());
  }
}

template <class F>
void atomically(const std::filesystem::path& path, F&& write_to) {
  const std::filesystem::path tmp = temp_sibling(path);
  try {
    write_to(tmp);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
  commit(tmp, path);
}

}  // namespace

std::vector<std::string> unique_labels(const std::vector<BnmfModel>& models) {
  std::vector<std::string> out;
  std::map<std::string, int> seen;
  for (const BnmfModel& m : models) {
    const std::string base = m.label.empty() ? "noise" : m.label;
    const int n = seen[base]++;
    out.push_back(n == 0 ? base : base + "_" + std::to_string(n + 1));
  }
  return out;
}

EnhanceRun run_enhancement(const RunConfig& config, const AudioSignal& noisy) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const BnmfModel speech = load_model(config.speech_model);
  EnhanceRun run;
  switch (config.mode) {
    case EnhanceMode::kOnline:
      run.result = enhance_file_online(speech, config.online_config(), noisy);
      run.class_labels = {"online"};
      break;
    case EnhanceMode::kSupervised: {
      const BnmfModel noise = load_model(config.noise_models.front());
      run.result = enhance_file_supervised(speech, noise, config.enhancer, noisy);
      run.class_labels = unique_labels({noise});
      break;
    }
    case EnhanceMode::kHmm: {
      std::vector<BnmfModel> noises;
      for (const std::string& p : config.noise_models) noises.push_back(load_model(p));
      run.class_labels = unique_labels(noises);
      const HmmDenoiser denoiser(speech, std::move(noises), config.enhancer);
      run.result = enhance_file(denoiser, noisy);
      break;
    }
  }
  run.seconds_elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

void write_class_trace_csv(std::ostream& out, const Matrix& trace,
                           const std::vector<std::string>& labels, const StftConfig& stft) {
  if (static_cast<Index>(labels.size()) != trace.rows()) {
    fail(ErrorKind::kShape, "class trace has " + std::to_string(trace.rows()) + " rows but " +
                                std::to_string(labels.size()) + " labels");
  }
  out << "frame,time_s";
  for (const std::string& l : labels) out << ',' << l;
  out << '\n';
  out << std::setprecision(10);
  for (Index t = 0; t < trace.cols(); ++t) {
    const double centre = (static_cast<double>(t) * stft.hop + 0.5 * stft.frame_len) / kSampleRate;
    out << t << ',' << centre;
    for (Index m = 0; m < trace.rows(); ++m) out << ',' << trace(m, t);
    out << '\n';
  }
}

void write_columns_csv(std::ostream& out, const Matrix& m) {
  out << "frame";
  for (Index k = 0; k < m.rows(); ++k) out << ",bin_" << k;
  out << '\n';
  out << std::setprecision(10);
  for (Index t = 0; t < m.cols(); ++t) {
    out << t;
    for (Index k = 0; k < m.rows(); ++k) out << ',' << m(k, t);
    out << '\n';
  }
}

void write_series_csv(std::ostream& out, const std::string& name, const std::vector<double>& values) {
  out << "frame," << name << '\n' << std::setprecision(10);
  for (std::size_t t = 0; t < values.size(); ++t) out << t << ',' << values[t] << '\n';
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::function<void(std::ostream&)>& writer) {
  atomically(path, [&](const std::filesystem::path& tmp) {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) fail(ErrorKind::kIo, "cannot write " + path.string());
    writer(out);
    out.flush();
    if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
  });
}

void write_wav_atomic(const std::filesystem::path& path, const AudioSignal& signal) {
  atomically(path, [&](const std::filesystem::path& tmp) { write_wav(tmp, signal); });
}

void save_model_atomic(const BnmfModel& model, const std::filesystem::path& path) {
  atomically(path, [&](const std::filesystem::path& tmp) { save_model(model, tmp); });
}

}  // namespace bnmfse
