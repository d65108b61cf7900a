#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wcells {

enum class Errc {
  HorizonExceeded,
  UnknownGenerator,
  InvalidSystem,
  InvalidWeights,
  InfiniteParabolic,
  InconsistentBar,
  UnsupportedLemma,
  NotDimensionTwo,
  NotInD,
  NonUniqueDecomposition,
  NotApplicableSystem,
  UnequalAValues,
  ConstraintUnsatisfiable,
  UndefinedInChamber,
  UnsupportedWithoutPrediction,
  FingerprintMismatch,
  CacheParse,
  IoError,
  Usage,
};

std::string_view errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace wcells
