#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bnmfse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr int kSampleRate = 16000;
inline constexpr int kFrameLength = 512;
inline constexpr int kHopLength = 256;
inline constexpr double kDefaultTargetMax = 10000.0;

enum class ErrorKind {
  kArgument,    // invalid parameter or option
  kFormat,      // unsupported or malformed file contents
  kRate,        // sample rate differs from the pipeline rate
  kLength,      // input too short for the requested analysis
  kShape,       // inconsistent matrix dimensions
  kContract,    // input violates a documented precondition
  kNumerical,   // NaN/Inf or an undefined quantity was produced
  kIo,          // filesystem failure
  kDegenerate,  // result is undefined for this input (e.g. zero energy)
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

// Diagnostics go to stderr unless silenced. Warnings never change results.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);
bool warnings_enabled();

}  // namespace bnmfse
