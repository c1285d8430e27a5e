#pragma once

#include <stdexcept>
#include <string>

namespace reloc {

enum class ErrorCode {
  EmptyInput,
  InvalidPoint,
  InvalidArgument,
  OutOfBounds,
  InvalidDirection,
  NoFeasibleRegion,
  EmptyBeamSet,
  IncompatibleDescriptors,
  InvalidShift,
  EmptyDatabase,
  InsufficientFrames,
  EmptyQuery,
  ConfigMismatch,
  InvalidPose,
  SpecError,
  BadMagic,
  UnsupportedVersion,
  Truncated,
  ParseError,
  Io,
};

const char* to_string(ErrorCode code);

/// Exception type thrown by every module. what() carries the short error
/// message, optionally followed by ": <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail = {});

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reloc
