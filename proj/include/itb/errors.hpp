#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace itb {

/// Failure categories raised by the library. The CLI maps validation kinds to
/// exit code 2 and numerical kinds to exit code 3.
enum class ErrorKind {
  InvalidArgument,
  ScenarioInvalid,
  GridTooCoarse,
  PacketClipped,
  AliasRisk,
  UnsupportedPotential,
  BoxEscape,
  StepTooLarge,
  NoConvergence,
  NearCaustic,
  CausticSingular,
  MultipleRoots,
  MomentumOutOfRange,
  DivisionNearZero,
};

std::string_view to_string(ErrorKind kind);

/// True for failures of the numerics (caustics, convergence, box escape)
/// rather than of the inputs.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& detail);

}  // namespace itb
