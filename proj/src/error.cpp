#include "fiberdyn/error.hpp"

namespace fiberdyn {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::BackwardNotInvertible: return "BackwardNotInvertible";
    case ErrorKind::NotHyperbolic: return "NotHyperbolic";
    case ErrorKind::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::PointsTooFar: return "PointsTooFar";
    case ErrorKind::SpacingTooSmall: return "SpacingTooSmall";
    case ErrorKind::NotAffine: return "NotAffine";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace fiberdyn
