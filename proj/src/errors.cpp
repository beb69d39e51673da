#include "karcher/errors.hpp"

namespace karcher {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::CutLocus: return "CutLocus";
    case ErrorKind::CutLocusEncountered: return "CutLocusEncountered";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::UnsupportedManifold: return "UnsupportedManifold";
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorKind::LiftAmbiguous: return "LiftAmbiguous";
    case ErrorKind::OutOfRange: return "OutOfRange";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace karcher
