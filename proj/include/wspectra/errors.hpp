#pragma once
// Single exception type carrying a machine-readable code.

#include <stdexcept>
#include <string>

namespace wspectra {

enum class ErrorCode {
  NotPositiveDefinite,
  NoConvergence,
  BadGrid,
  SingularAtOrigin,
  SingularPoint,
  FluxNotZero,
  EmptyRange,
  BadT,
  NegativeModes,
  HypothesisFails,
  MeasureMismatch,
  BadMode,
  BadDimension,
  BadBeta,
  BadAlpha,
  InadmissibleL,
  SourceSingular,
  BadParam,
  NotConformal,
  CenterOnSurface,
  ContourOutOfChart,
  OpenSurfaceWithoutClamp,
  ShapeMismatch,
  RingOutOfChart,
  IoError,
  Usage,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wspectra
