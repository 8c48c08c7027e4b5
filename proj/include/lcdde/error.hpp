#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcdde {

enum class ErrorKind {
  kInvalidInput,
  kInvalidLag,
  kDecompositionError,
  kMeshMismatch,
  kBudgetExceeded,
  kNotACommonZero,
  kNotCoprime,
  kCoronaViolated,
  kUnsupportedCase,
  kUnsupportedMesh,
  kConfigError,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid-input";
    case ErrorKind::kInvalidLag: return "invalid-lag";
    case ErrorKind::kDecompositionError: return "decomposition-error";
    case ErrorKind::kMeshMismatch: return "mesh-mismatch";
    case ErrorKind::kBudgetExceeded: return "budget-exceeded";
    case ErrorKind::kNotACommonZero: return "not-a-common-zero";
    case ErrorKind::kNotCoprime: return "not-coprime";
    case ErrorKind::kCoronaViolated: return "corona-violated";
    case ErrorKind::kUnsupportedCase: return "unsupported-case";
    case ErrorKind::kUnsupportedMesh: return "unsupported-mesh";
    case ErrorKind::kConfigError: return "config-error";
  }
  return "unknown";
}

/// Library-wide exception. `kind()` is stable and machine-readable; the
/// message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lcdde
