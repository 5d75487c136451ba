#include "bnmfse/common.hpp"

#include <atomic>
#include <iostream>

namespace bnmfse {
namespace {
std::atomic<bool> g_warnings_enabled{true};
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kRate: return "sample-rate error";
    case ErrorKind::kLength: return "length error";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kContract: return "contract error";
    case ErrorKind::kNumerical: return "numerical error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kDegenerate: return "degenerate input";
  }
  return "error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

void warn(const std::string& message) {
  if (g_warnings_enabled.load(std::memory_order_relaxed)) {
    std::clog << "warning: " << message << '\n';
  }
}

void set_warnings_enabled(bool enabled) {
  g_warnings_enabled.store(enabled, std::memory_order_relaxed);
}

bool warnings_enabled() {
  return g_warnings_enabled.load(std::memory_order_relaxed);
}

}  // namespace bnmfse
