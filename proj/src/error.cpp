#include "reloc/error.hpp"

namespace reloc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyInput: return "empty input";
    case ErrorCode::InvalidPoint: return "invalid point";
    case ErrorCode::InvalidArgument: return "invalid argument";
    case ErrorCode::OutOfBounds: return "out of bounds";
    case ErrorCode::InvalidDirection: return "invalid direction";
    case ErrorCode::NoFeasibleRegion: return "no feasible region";
    case ErrorCode::EmptyBeamSet: return "empty beam set";
    case ErrorCode::IncompatibleDescriptors: return "incompatible descriptors";
    case ErrorCode::InvalidShift: return "invalid shift";
    case ErrorCode::EmptyDatabase: return "empty database";
    case ErrorCode::InsufficientFrames: return "insufficient frames";
    case ErrorCode::EmptyQuery: return "empty query";
    case ErrorCode::ConfigMismatch: return "config/database mismatch";
    case ErrorCode::InvalidPose: return "invalid pose";
    case ErrorCode::SpecError: return "spec error";
    case ErrorCode::BadMagic: return "bad magic";
    case ErrorCode::UnsupportedVersion: return "unsupported version";
    case ErrorCode::Truncated: return "truncated file";
    case ErrorCode::ParseError: return "parse error";
    case ErrorCode::Io: return "i/o error";
  }
  return "unknown error";
}

namespace {
std::string compose(ErrorCode code, const std::string& detail) {
  std::string msg = to_string(code);
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}
}  // namespace

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(compose(code, detail)), code_(code) {}

}  // namespace reloc
