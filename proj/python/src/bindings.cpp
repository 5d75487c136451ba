#include "bnmfse/bnmf.hpp"
#include "bnmfse/experiments.hpp"
#include "bnmfse/hmm.hpp"
#include "bnmfse/metrics.hpp"
#include "bnmfse/mlnmf.hpp"
#include "bnmfse/online.hpp"
#include "bnmfse/priors.hpp"
#include "bnmfse/signal.hpp"
#include "bnmfse/synth.hpp"

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace bnmfse;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

std::vector<double> to_vector(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-D array of samples");
  return {a.data(), a.data() + a.size()};
}

AudioSignal to_signal(const Array& a) {
  AudioSignal s;
  s.samples = to_vector(a);
  return s;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::dict result_dict(const EnhanceResult& r) {
  py::dict d;
  d["enhanced"] = to_array(r.enhanced.samples);
  d["class_trace"] = r.class_trace;
  d["frames"] = r.frames;
  d["final_snr_db"] = r.final_snr_db;
  if (r.noise_basis_trace.size() > 0) d["noise_basis_trace"] = r.noise_basis_trace;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bayesian NMF speech enhancement";

  py::register_local_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      switch (e.kind()) {
        case ErrorKind::kIo: PyErr_SetString(PyExc_OSError, e.what()); return;
        case ErrorKind::kNumerical:
        case ErrorKind::kDegenerate: PyErr_SetString(PyExc_ArithmeticError, e.what()); return;
        default: PyErr_SetString(PyExc_ValueError, e.what()); return;
      }
    }
  });

  m.attr("SAMPLE_RATE") = kSampleRate;

  py::class_<BnmfModel>(m, "Model")
      .def_readwrite("label", &BnmfModel::label)
      .def_readwrite("activation_shape", &BnmfModel::activation_shape)
      .def_property_readonly("num_basis", &BnmfModel::num_basis)
      .def_property_readonly("num_bins", &BnmfModel::num_bins)
      .def_property_readonly("basis_mean", [](const BnmfModel& b) { return Matrix(b.basis.mean()); })
      .def_property_readonly("basis_shape", [](const BnmfModel& b) { return b.basis.shape; })
      .def("save", [](const BnmfModel& b, const std::filesystem::path& p) { save_model(b, p); })
      .def_static("load", &load_model)
      .def("__repr__", [](const BnmfModel& b) {
        return "<Model '" + b.label + "' " + std::to_string(b.num_bins()) + "x" + std::to_string(b.num_basis()) + ">";
      });

  m.def("read_wav", [](const std::filesystem::path& p) { return to_array(read_wav(p).samples); });
  m.def("write_wav", [](const std::filesystem::path& p, const Array& x) { return write_wav(p, to_signal(x)); });

  m.def(
      "train",
      [](const std::vector<Array>& signals, int num_basis, const std::string& label, std::uint64_t seed,
         int max_iter) {
        std::vector<AudioSignal> s;
        for (const Array& a : signals) s.push_back(to_signal(a));
        TrainOptions o;
        o.num_basis = num_basis;
        o.label = label;
        o.seed = seed;
        o.max_iter = max_iter;
        py::gil_scoped_release release;
        return train_from_signals(s, o);
      },
      py::arg("signals"), py::arg("num_basis"), py::arg("label") = "speech", py::arg("seed") = 0,
      py::arg("max_iter") = 200);

  m.def(
      "enhance",
      [](const Array& noisy, const BnmfModel& speech, const std::vector<BnmfModel>& noises, const std::string& mode,
         int noise_rank, std::uint64_t seed) {
        const AudioSignal x = to_signal(noisy);
        EnhanceResult r;
        py::gil_scoped_release release;
        if (mode == "online") {
          OnlineConfig c;
          c.noise_rank = noise_rank;
          c.seed = seed;
          r = enhance_file_online(speech, c, x);
        } else if (mode == "supervised") {
          if (noises.size() != 1) fail(ErrorKind::kArgument, "supervised mode needs exactly one noise model");
          r = enhance_file_supervised(speech, noises.front(), EnhancerConfig{}, x);
        } else if (mode == "hmm") {
          r = enhance_file(HmmDenoiser(speech, noises), x);
        } else {
          fail(ErrorKind::kArgument, "unknown mode '" + mode + "'");
        }
        py::gil_scoped_acquire acquire;
        return result_dict(r);
      },
      py::arg("noisy"), py::arg("speech"), py::arg("noises") = std::vector<BnmfModel>{}, py::arg("mode") = "hmm",
      py::arg("noise_rank") = 30, py::arg("seed") = 0);

  m.def(
      "synth_speech",
      [](double seconds, std::uint64_t seed) {
        SpeechSynthOptions o;
        o.seconds = seconds;
        o.seed = seed;
        return to_array(synth_speech(o).samples);
      },
      py::arg("seconds") = 5.0, py::arg("seed") = 1);
  m.def(
      "synth_noise",
      [](const std::string& name, double seconds, std::uint64_t seed) {
        return to_array(synth_noise(name, seconds, seed).samples);
      },
      py::arg("name"), py::arg("seconds") = 5.0, py::arg("seed") = 1);
  m.def("noise_presets", &noise_presets);

  m.def(
      "mix",
      [](const Array& speech, const Array& noise, double snr_db) {
        const Mixture mx = mix_at_snr(to_vector(speech), to_vector(noise), snr_db);
        return py::make_tuple(to_array(mx.noisy), to_array(mx.scaled_noise));
      },
      py::arg("speech"), py::arg("noise"), py::arg("snr_db"));

  m.def(
      "bss_eval",
      [](const Array& estimate, const Array& speech, const Array& noise) {
        const BssEval b = bss_eval(to_vector(estimate), to_vector(speech), to_vector(noise));
        py::dict d;
        d["sdr"] = b.sdr_db;
        d["sir"] = b.sir_db;
        d["sar"] = b.sar_db;
        return d;
      },
      py::arg("estimate"), py::arg("speech"), py::arg("noise"));
  m.def(
      "segsnr", [](const Array& e, const Array& r) { return segsnr(to_vector(e), to_vector(r)); },
      py::arg("estimate"), py::arg("reference"));
  m.def(
      "long_term_snr", [](const Array& x) { return estimate_long_term_snr(to_vector(x)); }, py::arg("noisy"));

  m.def(
      "kl_nmf",
      [](const Matrix& y, int num_basis, int iterations, std::uint64_t seed) {
        KlNmfOptions o;
        o.num_basis = num_basis;
        o.iterations = iterations;
        o.seed = seed;
        o.record_trace = true;
        const NmfFactors f = kl_nmf(y, o);
        return py::make_tuple(f.basis, f.activations, f.divergence_trace);
      },
      py::arg("y"), py::arg("num_basis"), py::arg("iterations") = 100, py::arg("seed") = 0);

  m.def(
      "magnitude_spectrogram", [](const Array& x) { return magnitude(stft(to_vector(x))); }, py::arg("signal"));
}
