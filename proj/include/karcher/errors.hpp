#pragma once

#include <stdexcept>
#include <string>

namespace karcher {

enum class ErrorKind {
  InvalidInput,
  CutLocus,
  CutLocusEncountered,
  MaxIterExceeded,
  NoConvergence,
  UnsupportedManifold,
  DegenerateSpectrum,
  RadiusTooLarge,
  LiftAmbiguous,
  OutOfRange,
};

const char* to_string(ErrorKind kind) noexcept;

/// Domain error raised by every module. The kind is what callers branch on;
/// the message carries the offending datum.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace karcher
