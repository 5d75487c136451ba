#include "bnmfse/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace bnmfse {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(ErrorKind::kArgument, "config key '" + key + "': '" + v + "' is not a number");
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    fail(ErrorKind::kArgument, "config key '" + key + "': '" + v + "' is not an integer");
  }
  return out;
}

int to_small_int(const std::string& key, const std::string& v) {
  const long long x = to_int(key, v);
  if (x < -1000000000LL || x > 1000000000LL) fail(ErrorKind::kArgument, "config key '" + key + "' out of range");
  return static_cast<int>(x);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

ConfigFile ConfigFile::parse(std::istream& in, const std::string& source) {
  ConfigFile cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail(ErrorKind::kFormat, where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key)) fail(ErrorKind::kFormat, where + ": invalid key '" + key + "'");
    if (cfg.values_.count(key)) fail(ErrorKind::kFormat, where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open config file " + path.string());
  return parse(in, path.string());
}

std::optional<std::string> ConfigFile::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

EnhanceMode parse_mode(const std::string& text) {
  if (text == "supervised") return EnhanceMode::kSupervised;
  if (text == "hmm") return EnhanceMode::kHmm;
  if (text == "online") return EnhanceMode::kOnline;
  fail(ErrorKind::kArgument, "unknown mode '" + text + "' (expected supervised, hmm or online)");
}

const char* to_string(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::kSupervised: return "supervised";
    case EnhanceMode::kHmm: return "hmm";
    case EnhanceMode::kOnline: return "online";
  }
  return "?";
}

std::vector<std::string> RunConfig::known_keys() {
  return {"mode",          "speech_model",     "noise_models",     "seed",
          "frame_len",     "hop",              "stream_gain",      "speech_shape",
          "max_iter",      "tol",              "transition_diag",  "classifier_smoothing",
          "initial_snr",   "alpha_snr_low",    "alpha_low",        "alpha_snr_high",
          "alpha_high",    "n1",               "n2",               "q",
          "noise_rank",    "psi_flatten",      "prior_floor",      "init_iterations",
          "online_max_iter", "noise_shape"};
}

void RunConfig::apply(const std::string& key, const std::string& v) {
  EnhancerConfig& e = enhancer;
  if (key == "mode") mode = parse_mode(v);
  else if (key == "speech_model") speech_model = v;
  else if (key == "noise_models") noise_models = split_list(v);
  else if (key == "seed") {
    const long long s = to_int(key, v);
    if (s < 0) fail(ErrorKind::kArgument, "seed must be >= 0");
    seed = static_cast<std::uint64_t>(s);
  }
  else if (key == "frame_len") e.stft.frame_len = to_small_int(key, v);
  else if (key == "hop") e.stft.hop = to_small_int(key, v);
  else if (key == "stream_gain") e.stream_gain = to_double(key, v);
  else if (key == "speech_shape") e.speech_activation_shape = to_double(key, v);
  else if (key == "max_iter") e.max_iter = to_small_int(key, v);
  else if (key == "tol") e.tol = to_double(key, v);
  else if (key == "transition_diag") e.transition_diagonal = to_double(key, v);
  else if (key == "classifier_smoothing") e.classifier_smoothing = to_double(key, v);
  else if (key == "initial_snr") e.initial_snr_db = to_double(key, v);
  else if (key == "alpha_snr_low") e.alpha_curve.snr_low_db = to_double(key, v);
  else if (key == "alpha_low") e.alpha_curve.alpha_low = to_double(key, v);
  else if (key == "alpha_snr_high") e.alpha_curve.snr_high_db = to_double(key, v);
  else if (key == "alpha_high") e.alpha_curve.alpha_high = to_double(key, v);
  else if (key == "n1") online.buffers.n1 = to_small_int(key, v);
  else if (key == "n2") online.buffers.n2 = to_small_int(key, v);
  else if (key == "q") online.buffers.q = to_small_int(key, v);
  else if (key == "noise_rank") online.noise_rank = to_small_int(key, v);
  else if (key == "psi_flatten") online.psi_flatten = to_double(key, v);
  else if (key == "prior_floor") online.prior_floor = to_double(key, v);
  else if (key == "init_iterations") online.init_iterations = to_small_int(key, v);
  else if (key == "online_max_iter") online.vb_max_iter = to_small_int(key, v);
  else if (key == "noise_shape") {
    e.noise_activation_shape = to_double(key, v);
    online.noise_activation_shape = e.noise_activation_shape;
  }
  else fail(ErrorKind::kArgument, "unknown config key '" + key + "'");
}

void RunConfig::apply(const ConfigFile& file) {
  for (const auto& [k, v] : file.values()) apply(k, v);
}

OnlineConfig RunConfig::online_config() const {
  OnlineConfig o = online;
  o.enhancer = enhancer;
  o.seed = seed;
  return o;
}

void RunConfig::validate() const {
  enhancer.validate();
  online_config().validate();
  switch (mode) {
    case EnhanceMode::kSupervised:
      if (noise_models.size() != 1) fail(ErrorKind::kArgument, "supervised mode needs exactly one noise model");
      break;
    case EnhanceMode::kHmm:
      if (noise_models.empty()) fail(ErrorKind::kArgument, "hmm mode needs at least one noise model");
      break;
    case EnhanceMode::kOnline:
      break;
  }
  if (speech_model.empty()) fail(ErrorKind::kArgument, "a speech model is required");
  std::vector<std::string> paths = noise_models;
  paths.push_back(speech_model);
  for (const std::string& p : paths) {
    if (!std::filesystem::exists(p)) fail(ErrorKind::kIo, "model file not found: " + p);
  }
}

std::vector<std::string> read_model_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open model list " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::filesystem::path p(line);
    if (p.is_relative()) p = path.parent_path() / p;
    out.push_back(p.string());
  }
  return out;
}

}  // namespace bnmfse
