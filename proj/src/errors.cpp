#include "itb/errors.hpp"

namespace itb {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ScenarioInvalid: return "ScenarioInvalid";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::PacketClipped: return "PacketClipped";
    case ErrorKind::AliasRisk: return "AliasRisk";
    case ErrorKind::UnsupportedPotential: return "UnsupportedPotential";
    case ErrorKind::BoxEscape: return "BoxEscape";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NearCaustic: return "NearCaustic";
    case ErrorKind::CausticSingular: return "CausticSingular";
    case ErrorKind::MultipleRoots: return "MultipleRoots";
    case ErrorKind::MomentumOutOfRange: return "MomentumOutOfRange";
    case ErrorKind::DivisionNearZero: return "DivisionNearZero";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BoxEscape:
    case ErrorKind::StepTooLarge:
    case ErrorKind::NoConvergence:
    case ErrorKind::NearCaustic:
    case ErrorKind::CausticSingular:
    case ErrorKind::MultipleRoots:
    case ErrorKind::MomentumOutOfRange:
    case ErrorKind::DivisionNearZero:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

}  // namespace itb
