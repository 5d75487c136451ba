#pragma once

#include "bnmfse/hmm.hpp"
#include "bnmfse/online.hpp"

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bnmfse {

// Flat `key = value` text. '#' starts a comment, blank lines are ignored,
// keys are [a-z0-9_] and may appear once.
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::string& source = "<config>");
  static ConfigFile load(const std::filesystem::path& path);

  std::optional<std::string> get(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

enum class EnhanceMode { kSupervised, kHmm, kOnline };

EnhanceMode parse_mode(const std::string& text);
const char* to_string(EnhanceMode mode);

struct RunConfig {
  EnhanceMode mode = EnhanceMode::kHmm;
  std::string speech_model;
  std::vector<std::string> noise_models;
  std::uint64_t seed = 0;
  EnhancerConfig enhancer;
  OnlineConfig online;  // its enhancer member is synchronised from `enhancer`

  // Applies every key of the file; unknown keys are argument errors.
  void apply(const ConfigFile& file);
  void apply(const std::string& key, const std::string& value);
  void validate() const;

  OnlineConfig online_config() const;
  static std::vector<std::string> known_keys();
};

// One path per line; blank lines and '#' comments are skipped. Relative
// paths are resolved against the list file's directory.
std::vector<std::string> read_model_list(const std::filesystem::path& path);

}  // namespace bnmfse
