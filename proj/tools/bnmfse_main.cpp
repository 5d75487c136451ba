#include "bnmfse/bnmf.hpp"
#include "bnmfse/config.hpp"
#include "bnmfse/experiments.hpp"
#include "bnmfse/metrics.hpp"
#include "bnmfse/pipeline.hpp"
#include "bnmfse/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bnmfse;

namespace {

enum ExitCode { kOk = 0, kIoFailure = 1, kArgumentError = 2, kFormatError = 3, kNumericalError = 4 };

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument:
    case ErrorKind::kLength:
    case ErrorKind::kContract:
      return kArgumentError;
    case ErrorKind::kFormat:
    case ErrorKind::kRate:
    case ErrorKind::kShape:
      return kFormatError;
    case ErrorKind::kNumerical:
    case ErrorKind::kDegenerate:
      return kNumericalError;
    case ErrorKind::kIo:
      return kIoFailure;
  }
  return kIoFailure;
}

void require_parent_dir(const fs::path& out) {
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(dir)) fail(ErrorKind::kIo, "output directory does not exist: " + dir.string());
}

void require_readable(const fs::path& p) {
  if (!fs::is_regular_file(p)) fail(ErrorKind::kIo, "no such file: " + p.string());
}

// Options shared by enhance and classify.
struct ModelArgs {
  std::string config_path;
  std::string mode;
  std::string speech_model;
  std::vector<std::string> noise_models;
  std::string noise_list;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;

  void add_to(CLI::App* app, bool with_mode) {
    app->add_option("-c,--config", config_path, "key = value config file");
    if (with_mode) app->add_option("-m,--mode", mode, "supervised, hmm or online");
    app->add_option("-s,--speech-model", speech_model, "speech model file");
    app->add_option("-n,--noise-model", noise_models, "noise model file (repeatable)")->allow_extra_args(false);
    app->add_option("--noise-list", noise_list, "text file with one noise model path per line");
    app->add_option("--set", overrides, "override a config key: key=value (repeatable)")->allow_extra_args(false);
    app->add_option("--seed", seed, "random seed");
  }

  RunConfig resolve() const {
    RunConfig rc;
    if (!config_path.empty()) {
      const fs::path base = fs::path(config_path).parent_path();
      ConfigFile file = ConfigFile::load(config_path);
      rc.apply(file);
      // Model paths in a config file are relative to the file.
      auto rel = [&](const std::string& p) {
        const fs::path q(p);
        return q.is_relative() && !base.empty() ? (base / q).string() : p;
      };
      if (!rc.speech_model.empty()) rc.speech_model = rel(rc.speech_model);
      for (std::string& p : rc.noise_models) p = rel(p);
    }
    for (const std::string& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) fail(ErrorKind::kArgument, "--set expects key=value, got '" + kv + "'");
      rc.apply(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!mode.empty()) rc.mode = parse_mode(mode);
    if (!speech_model.empty()) rc.speech_model = speech_model;
    if (!noise_models.empty() || !noise_list.empty()) {
      rc.noise_models = noise_models;
      if (!noise_list.empty()) {
        for (const std::string& p : read_model_list(noise_list)) rc.noise_models.push_back(p);
      }
    }
    if (seed) rc.seed = *seed;
    return rc;
  }
};

std::string fmt_db(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s << std::fixed << std::setprecision(2) << v;
  return s.str();
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::optional<int> rank;
  std::string label = "speech";
  std::uint64_t seed = 0;
  int max_iter = 200;
  int init_iterations = 30;
  double target_max = kDefaultTargetMax;
  bool optimize = false;
};

int cmd_train(const TrainArgs& a) {
  TrainOptions opt;
  opt.label = a.label;
  opt.num_basis = a.rank ? *a.rank : (a.label == "speech" ? 60 : 100);
  if (opt.num_basis < 1) fail(ErrorKind::kArgument, "--rank must be >= 1");
  opt.seed = a.seed;
  opt.max_iter = a.max_iter;
  opt.init_iterations = a.init_iterations;
  opt.optimize_hyperparameters = a.optimize;
  if (opt.max_iter < 1) fail(ErrorKind::kArgument, "--max-iter must be >= 1");
  if (!(a.target_max >= 100.0)) fail(ErrorKind::kArgument, "--target-max must be >= 100");
  require_parent_dir(a.out);
  for (const std::string& p : a.inputs) require_readable(p);

  std::vector<AudioSignal> signals;
  for (const std::string& p : a.inputs) signals.push_back(read_wav(p));
  TrainReport report;
  const BnmfModel model = train_from_signals(signals, opt, a.target_max, &report);
  save_model_atomic(model, a.out);
  std::cout << "trained '" << model.label << "': K=" << model.num_bins() << " I=" << model.num_basis()
            << " files=" << signals.size() << " activation_shape=" << model.activation_shape
            << " vb_iterations=" << report.bound_trace.size() << '\n';
  if (report.reseeded_columns > 0) std::cout << "reseeded columns: " << report.reseeded_columns << '\n';
  return kOk;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  std::string out;
  double seconds = 5.0;
  std::uint64_t seed = 1;
  double rms = 0.05;
};

int cmd_synth(const SynthArgs& a) {
  if (!(a.seconds > 0.0 && a.seconds <= 3600.0)) fail(ErrorKind::kArgument, "--seconds must lie in (0, 3600]");
  const auto presets = noise_presets();
  if (a.kind != "speech" && std::find(presets.begin(), presets.end(), a.kind) == presets.end()) {
    std::string list = "speech";
    for (const std::string& p : presets) list += ", " + p;
    fail(ErrorKind::kArgument, "unknown kind '" + a.kind + "' (expected one of " + list + ")");
  }
  require_parent_dir(a.out);
  AudioSignal s;
  if (a.kind == "speech") {
    SpeechSynthOptions o;
    o.seconds = a.seconds;
    o.seed = a.seed;
    o.rms = a.rms;
    s = synth_speech(o);
  } else {
    s = synth_noise(a.kind, a.seconds, a.seed, a.rms);
  }
  write_wav_atomic(a.out, s);
  std::cout << "wrote " << a.out << " (" << a.kind << ", " << s.duration_seconds() << " s)\n";
  return kOk;
}

// ---- enhance / classify -------------------------------------------------

struct EnhanceArgs {
  ModelArgs models;
  std::string input;
  std::string output;
  std::string class_trace;
  std::string basis_trace;
};

int cmd_enhance(const EnhanceArgs& a) {
  const RunConfig rc = a.models.resolve();
  rc.validate();
  require_readable(a.input);
  require_parent_dir(a.output);
  if (!a.class_trace.empty()) require_parent_dir(a.class_trace);
  if (!a.basis_trace.empty()) {
    require_parent_dir(a.basis_trace);
    if (rc.mode != EnhanceMode::kOnline) fail(ErrorKind::kArgument, "--basis-trace needs online mode");
  }
  const AudioSignal noisy = read_wav(a.input);
  const EnhanceRun run = run_enhancement(rc, noisy);
  write_wav_atomic(a.output, run.result.enhanced);
  if (!a.class_trace.empty()) {
    write_text_atomic(a.class_trace, [&](std::ostream& o) {
      write_class_trace_csv(o, run.result.class_trace, run.class_labels, rc.enhancer.stft);
    });
  }
  if (!a.basis_trace.empty()) {
    write_text_atomic(a.basis_trace, [&](std::ostream& o) { write_columns_csv(o, run.result.noise_basis_trace); });
  }
  std::cout << "mode=" << to_string(rc.mode) << " frames=" << run.result.frames << " runtime_s=" << std::fixed
            << std::setprecision(2) << run.seconds_elapsed << " long_term_snr_db=" << run.result.final_snr_db
            << '\n';
  return kOk;
}

struct ClassifyArgs {
  ModelArgs models;
  std::string input;
  std::string out;
};

int cmd_classify(const ClassifyArgs& a) {
  RunConfig rc = a.models.resolve();
  rc.mode = EnhanceMode::kHmm;
  rc.validate();
  require_readable(a.input);
  if (!a.out.empty()) require_parent_dir(a.out);
  const AudioSignal noisy = read_wav(a.input);
  const EnhanceRun run = run_enhancement(rc, noisy);
  const Matrix& trace = run.result.class_trace;
  if (!a.out.empty()) {
    write_text_atomic(a.out, [&](std::ostream& o) {
      write_class_trace_csv(o, trace, run.class_labels, rc.enhancer.stft);
    });
  }
  std::vector<Index> wins(static_cast<std::size_t>(trace.rows()), 0);
  for (Index t = 0; t < trace.cols(); ++t) {
    Index best = 0;
    trace.col(t).maxCoeff(&best);
    ++wins[static_cast<std::size_t>(best)];
  }
  std::cout << "label,mean_probability,frames_most_likely\n" << std::fixed << std::setprecision(4);
  for (Index m = 0; m < trace.rows(); ++m) {
    std::cout << run.class_labels[static_cast<std::size_t>(m)] << ',' << trace.row(m).mean() << ','
              << wins[static_cast<std::size_t>(m)] << '\n';
  }
  return kOk;
}

// ---- mix -----------------------------------------------------------------

struct MixArgs {
  std::string speech;
  std::string noise;
  double snr_db = 0.0;
  std::string out;
  std::string noise_out;
};

int cmd_mix(const MixArgs& a) {
  if (!std::isfinite(a.snr_db)) fail(ErrorKind::kArgument, "--snr must be finite");
  require_readable(a.speech);
  require_readable(a.noise);
  require_parent_dir(a.out);
  if (!a.noise_out.empty()) require_parent_dir(a.noise_out);
  const AudioSignal s = read_wav(a.speech);
  const AudioSignal n = read_wav(a.noise);
  const Mixture mix = mix_at_snr(s.samples, n.samples, a.snr_db);
  AudioSignal noisy;
  noisy.samples = mix.noisy;
  double peak = 0.0;
  for (double v : noisy.samples) peak = std::max(peak, std::abs(v));
  if (peak > 1.0) fail(ErrorKind::kNumerical, "mixture clips (peak " + std::to_string(peak) + "); lower the input levels");
  write_wav_atomic(a.out, noisy);
  if (!a.noise_out.empty()) {
    AudioSignal ns;
    ns.samples = mix.scaled_noise;
    write_wav_atomic(a.noise_out, ns);
  }
  std::cout << "snr_db=" << fmt_db(measured_snr_db(s.samples, mix.scaled_noise)) << " noise_gain=" << mix.noise_gain
            << '\n';
  return kOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string speech;
  std::string noise;
  std::vector<std::string> estimates;
  std::string csv;
  std::string window_csv;
  double window_seconds = 0.0;
};

int cmd_eval(const EvalArgs& a) {
  if (!(a.window_seconds >= 0.0)) fail(ErrorKind::kArgument, "--window must be >= 0");
  if (!a.window_csv.empty() && a.window_seconds <= 0.0) {
    fail(ErrorKind::kArgument, "--window-csv needs --window > 0");
  }
  require_readable(a.speech);
  require_readable(a.noise);
  for (const std::string& e : a.estimates) require_readable(e);
  if (!a.csv.empty()) require_parent_dir(a.csv);
  if (!a.window_csv.empty()) require_parent_dir(a.window_csv);

  const AudioSignal s = read_wav(a.speech);
  const AudioSignal n = read_wav(a.noise);
  const std::size_t window = static_cast<std::size_t>(std::llround(a.window_seconds * kSampleRate));
  std::vector<NamedReport> reports;
  for (const std::string& path : a.estimates) {
    const AudioSignal e = read_wav(path);
    reports.push_back({fs::path(path).stem().string(), evaluate(e.samples, s.samples, n.samples, window)});
  }
  print_eval_table(std::cout, reports);
  if (!a.csv.empty()) write_text_atomic(a.csv, [&](std::ostream& o) { write_eval_csv(o, reports); });
  if (!a.window_csv.empty()) write_text_atomic(a.window_csv, [&](std::ostream& o) { write_window_csv(o, reports); });
  return kOk;
}

// ---- toy-fig3 ------------------------------------------------------------

struct ToyArgs {
  ToyOptions options;
  std::string speech_model;
  std::string trajectory;
  std::string errors;
  std::string audio_dir;
};

int cmd_toy(const ToyArgs& a) {
  if (!a.speech_model.empty()) require_readable(a.speech_model);
  if (!a.trajectory.empty()) require_parent_dir(a.trajectory);
  if (!a.errors.empty()) require_parent_dir(a.errors);
  if (!a.audio_dir.empty() && !fs::is_directory(a.audio_dir)) {
    fail(ErrorKind::kIo, "no such directory: " + a.audio_dir);
  }
  std::optional<BnmfModel> speech;
  if (!a.speech_model.empty()) speech = load_model(a.speech_model);
  const ToyResult r = run_toy(a.options, speech ? &*speech : nullptr);
  if (!a.trajectory.empty()) write_text_atomic(a.trajectory, [&](std::ostream& o) { write_columns_csv(o, r.basis_trajectory); });
  if (!a.errors.empty()) write_text_atomic(a.errors, [&](std::ostream& o) { write_series_csv(o, "kl_error", r.adaptation_error); });
  if (!a.audio_dir.empty()) {
    const fs::path d(a.audio_dir);
    write_wav_atomic(d / "toy_speech.wav", r.speech);
    write_wav_atomic(d / "toy_noise.wav", r.noise);
    write_wav_atomic(d / "toy_noisy.wav", r.noisy);
    write_wav_atomic(d / "toy_enhanced.wav", r.enhanced);
  }
  std::cout << std::fixed << std::setprecision(2) << "sdr_noisy_db=" << r.sdr_noisy_db
            << "\nsdr_enhanced_db=" << r.sdr_enhanced_db << "\nsdr_improvement_db=" << r.sdr_improvement_db
            << "\nswitch_frame=" << r.switch_frame << "\nlatency_frames=" << r.latency_frames
            << "\nnew_peak_share=" << std::setprecision(3) << r.new_peak_share << "\nruntime_s=" << std::setprecision(2)
            << r.seconds_elapsed << '\n';
  return kOk;
}

// ---- model-info ----------------------------------------------------------

int cmd_model_info(const std::string& path) {
  require_readable(path);
  const BnmfModel m = load_model(path);
  const Matrix mean = m.basis.mean();
  std::cout << "label=" << m.label << "\nformat_version=" << kModelFormatVersion << "\nbins=" << m.num_bins()
            << "\nbasis_vectors=" << m.num_basis() << "\nactivation_shape=" << m.activation_shape
            << "\nsample_rate=" << m.sample_rate << "\nframe_len=" << m.frame_len << "\ntarget_max=" << m.target_max
            << "\nbasis_shape_min=" << m.basis.shape.minCoeff() << "\nbasis_shape_max=" << m.basis.shape.maxCoeff()
            << "\nbasis_mean_max=" << mean.maxCoeff() << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian NMF speech enhancement"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "learn a BNMF model from WAV files");
  c_train->add_option("inputs", train.inputs, "16 kHz mono WAV files")->required();
  c_train->add_option("-o,--out", train.out, "model file")->required();
  c_train->add_option("-r,--rank", train.rank, "basis vectors (default 60 for speech, 100 otherwise)");
  c_train->add_option("-l,--label", train.label, "model label");
  c_train->add_option("--seed", train.seed);
  c_train->add_option("--max-iter", train.max_iter, "VB iterations");
  c_train->add_option("--init-iterations", train.init_iterations, "KL-NMF warm-start iterations");
  c_train->add_option("--target-max", train.target_max, "quantization peak");
  c_train->add_flag("--optimize-hyper", train.optimize, "Newton updates of the prior hyperparameters");

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "write a synthetic speech or noise WAV");
  c_synth->add_option("kind", synth.kind, "speech or a noise preset")->required();
  c_synth->add_option("-o,--out", synth.out, "output WAV")->required();
  c_synth->add_option("--seconds", synth.seconds);
  c_synth->add_option("--seed", synth.seed);
  c_synth->add_option("--rms", synth.rms);

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "enhance a noisy WAV");
  enh.models.add_to(c_enh, true);
  c_enh->add_option("input", enh.input, "noisy WAV")->required();
  c_enh->add_option("output", enh.output, "enhanced WAV")->required();
  c_enh->add_option("--class-trace", enh.class_trace, "CSV of smoothed class posteriors");
  c_enh->add_option("--basis-trace", enh.basis_trace, "CSV of the first noise basis vector per frame (online)");

  ClassifyArgs cls;
  auto* c_cls = app.add_subcommand("classify", "noise-type posteriors per frame");
  cls.models.add_to(c_cls, false);
  c_cls->add_option("input", cls.input, "noisy WAV")->required();
  c_cls->add_option("-o,--out", cls.out, "class trace CSV");

  MixArgs mix;
  auto* c_mix = app.add_subcommand("mix", "mix speech and noise at a given SNR");
  c_mix->add_option("--speech", mix.speech)->required();
  c_mix->add_option("--noise", mix.noise)->required();
  c_mix->add_option("--snr", mix.snr_db, "dB")->required();
  c_mix->add_option("-o,--out", mix.out, "noisy WAV")->required();
  c_mix->add_option("--noise-out", mix.noise_out, "scaled noise WAV (the eval reference)");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "SDR/SIR/SAR and segmental SNR");
  c_eval->add_option("--speech", ev.speech, "clean speech reference")->required();
  c_eval->add_option("--noise", ev.noise, "noise reference")->required();
  c_eval->add_option("estimates", ev.estimates, "estimate WAVs")->required();
  c_eval->add_option("--csv", ev.csv, "summary CSV");
  c_eval->add_option("--window-csv", ev.window_csv, "per-window SDR CSV");
  c_eval->add_option("--window", ev.window_seconds, "window length in seconds");

  ToyArgs toy;
  auto* c_toy = app.add_subcommand("toy-fig3", "online basis adaptation on a switching two-harmonic noise");
  c_toy->add_option("--seed", toy.options.seed);
  c_toy->add_option("--seconds", toy.options.seconds);
  c_toy->add_option("--switch", toy.options.switch_seconds, "time of the noise change (s)");
  c_toy->add_option("--f-before", toy.options.f_before, "fundamental before the switch (Hz)");
  c_toy->add_option("--f-after", toy.options.f_after, "fundamental after the switch (Hz)");
  c_toy->add_option("--snr", toy.options.snr_db);
  c_toy->add_option("--speech-model", toy.speech_model, "use this model instead of training one");
  c_toy->add_option("--trajectory", toy.trajectory, "CSV of the noise basis vector per frame");
  c_toy->add_option("--errors", toy.errors, "CSV of the new-noise reconstruction error per frame");
  c_toy->add_option("--audio-dir", toy.audio_dir, "write speech/noise/noisy/enhanced WAVs here");

  std::string model_path;
  auto* c_info = app.add_subcommand("model-info", "print a model file's header");
  c_info->add_option("model", model_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgumentError;
  }
  set_warnings_enabled(!quiet);

  try {
    if (*c_train) return cmd_train(train);
    if (*c_synth) return cmd_synth(synth);
    if (*c_enh) return cmd_enhance(enh);
    if (*c_cls) return cmd_classify(cls);
    if (*c_mix) return cmd_mix(mix);
    if (*c_eval) return cmd_eval(ev);
    if (*c_toy) return cmd_toy(toy);
    if (*c_info) return cmd_model_info(model_path);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kArgumentError;
}
