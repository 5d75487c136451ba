#include "bnmfse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>

namespace bnmfse {
namespace {

constexpr double kSegLowDb = -10.0;
constexpr double kSegHighDb = 30.0;
constexpr double kSilenceRatio = 1e-6;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double ratio_db(double num, double den) {
  if (den <= 0.0) return num > 0.0 ? kMetricCapDb : -kMetricCapDb;
  if (num <= 0.0) return -kMetricCapDb;
  return std::clamp(10.0 * std::log10(num / den), -kMetricCapDb, kMetricCapDb);
}

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    fail(ErrorKind::kShape, std::string(what) + ": signals differ in length (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

}  // namespace

BssEval bss_eval(std::span<const double> estimate, std::span<const double> speech,
                 std::span<const double> noise) {
  require_same_length(estimate.size(), speech.size(), "bss_eval");
  require_same_length(estimate.size(), noise.size(), "bss_eval");
  BssEval out;
  const double ss = dot(speech, speech);
  if (!(ss > 0.0)) {
    out.degenerate = true;
    out.sdr_db = out.sir_db = out.sar_db = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double se = dot(speech, estimate);
  const double a = se / ss;  // target gain

  // Least squares on span{speech, noise}; drop the noise direction when it
  // is (numerically) absent or parallel to the speech.
  const double nn = dot(noise, noise);
  const double sn = dot(speech, noise);
  const double ne = dot(noise, estimate);
  double cs = a;
  double cn = 0.0;
  const double det = ss * nn - sn * sn;
  if (nn > 0.0 && det > 1e-12 * ss * nn) {
    cs = (nn * se - sn * ne) / det;
    cn = (ss * ne - sn * se) / det;
  }

  double target = 0.0, interf = 0.0, artif = 0.0, distortion = 0.0, target_interf = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double t = a * speech[i];
    const double proj = cs * speech[i] + cn * noise[i];
    const double ei = proj - t;
    const double ea = estimate[i] - proj;
    target += t * t;
    interf += ei * ei;
    artif += ea * ea;
    distortion += (ei + ea) * (ei + ea);
    target_interf += (t + ei) * (t + ei);
  }
  out.sdr_db = ratio_db(target, distortion);
  out.sir_db = ratio_db(target, interf);
  out.sar_db = ratio_db(target_interf, artif);
  return out;
}

double segsnr(std::span<const double> estimate, std::span<const double> reference, int frame_len,
              int hop) {
  require_same_length(estimate.size(), reference.size(), "segsnr");
  if (frame_len < 1 || hop < 1) fail(ErrorKind::kArgument, "segsnr: frame and hop must be positive");
  if (reference.size() < static_cast<std::size_t>(frame_len)) {
    fail(ErrorKind::kLength, "segsnr: signal is shorter than one frame");
  }
  const std::size_t frames = (reference.size() - frame_len) / hop + 1;
  std::vector<double> ref_energy(frames), err_energy(frames);
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    double r = 0.0, e = 0.0;
    for (int n = 0; n < frame_len; ++n) {
      const std::size_t i = t * hop + n;
      r += reference[i] * reference[i];
      const double d = reference[i] - estimate[i];
      e += d * d;
    }
    ref_energy[t] = r;
    err_energy[t] = e;
    total += r;
  }
  const double threshold = kSilenceRatio * total / double(frames);
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t t = 0; t < frames; ++t) {
    if (!(ref_energy[t] > threshold)) continue;
    const double snr = err_energy[t] > 0.0 ? 10.0 * std::log10(ref_energy[t] / err_energy[t]) : kSegHighDb;
    sum += std::clamp(snr, kSegLowDb, kSegHighDb);
    ++used;
  }
  if (used == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / double(used);
}

double measured_snr_db(std::span<const double> speech, std::span<const double> noise) {
  const double ps = dot(speech, speech) / double(std::max<std::size_t>(speech.size(), 1));
  const double pn = dot(noise, noise) / double(std::max<std::size_t>(noise.size(), 1));
  return 10.0 * std::log10(ps / pn);
}

Mixture mix_at_snr(std::span<const double> speech, std::span<const double> noise, double snr_db) {
  if (!std::isfinite(snr_db)) fail(ErrorKind::kArgument, "mix_at_snr: SNR must be finite");
  if (speech.empty() || noise.empty()) fail(ErrorKind::kDegenerate, "mix_at_snr: empty input");
  Mixture m;
  m.scaled_noise.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) m.scaled_noise[i] = noise[i % noise.size()];
  const double ps = dot(speech, speech) / double(speech.size());
  const double pn = dot(m.scaled_noise, m.scaled_noise) / double(speech.size());
  if (!(ps > 0.0)) fail(ErrorKind::kDegenerate, "mix_at_snr: speech has zero power");
  if (!(pn > 0.0)) fail(ErrorKind::kDegenerate, "mix_at_snr: noise has zero power");
  m.noise_gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  m.noisy.resize(speech.size());
  for (std::size_t i = 0; i < speech.size(); ++i) {
    m.scaled_noise[i] *= m.noise_gain;
    m.noisy[i] = speech[i] + m.scaled_noise[i];
  }
  return m;
}

EvalReport evaluate(std::span<const double> estimate, std::span<const double> speech,
                    std::span<const double> noise, std::size_t window_samples) {
  EvalReport r;
  const BssEval b = bss_eval(estimate, speech, noise);
  r.sdr_db = b.sdr_db;
  r.sir_db = b.sir_db;
  r.sar_db = b.sar_db;
  r.degenerate = b.degenerate;
  if (speech.size() >= 512) {
    r.segsnr_db = segsnr(estimate, speech);
    if (std::isnan(r.segsnr_db)) r.degenerate = true;
  } else {
    r.segsnr_db = std::numeric_limits<double>::quiet_NaN();
    r.degenerate = true;
  }
  if (window_samples > 0) {
    for (std::size_t start = 0, w = 0; start + window_samples <= speech.size();
         start += window_samples, ++w) {
      const BssEval bw = bss_eval(estimate.subspan(start, window_samples),
                                  speech.subspan(start, window_samples),
                                  noise.subspan(start, window_samples));
      r.per_window.push_back({static_cast<Index>(w), bw.sdr_db});
    }
  }
  return r;
}

void write_eval_csv(std::ostream& out, const std::vector<NamedReport>& reports) {
  out << "name,sdr_db,sir_db,sar_db,segsnr_db,degenerate\n";
  for (const NamedReport& n : reports) {
    const EvalReport& r = n.report;
    out << n.name << ',' << fmt(r.sdr_db) << ',' << fmt(r.sir_db) << ',' << fmt(r.sar_db) << ','
        << fmt(r.segsnr_db) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

void write_window_csv(std::ostream& out, const std::vector<NamedReport>& reports) {
  out << "name,window_index,sdr_db\n";
  for (const NamedReport& n : reports) {
    for (const WindowSdr& w : n.report.per_window) {
      out << n.name << ',' << w.window << ',' << fmt(w.sdr_db) << '\n';
    }
  }
}

void print_eval_table(std::ostream& out, const std::vector<NamedReport>& reports) {
  std::size_t width = 4;
  for (const NamedReport& n : reports) width = std::max(width, n.name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "name" << std::right;
  for (const char* h : {"SDR", "SIR", "SAR", "SegSNR"}) out << std::setw(10) << h;
  out << '\n';
  for (const NamedReport& n : reports) {
    const EvalReport& r = n.report;
    out << std::left << std::setw(static_cast<int>(width)) << n.name << std::right << std::fixed
        << std::setprecision(2);
    for (double v : {r.sdr_db, r.sir_db, r.sar_db, r.segsnr_db}) out << std::setw(10) << v;
    if (r.degenerate) out << "  (degenerate)";
    out << '\n';
  }
  out.unsetf(std::ios::fixed);
}

}  // namespace bnmfse
