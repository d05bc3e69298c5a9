#include "lam/error.hpp"

namespace lam {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::CapExceeded: return "cap_exceeded";
    case ErrorCode::BoundExceeded: return "bound_exceeded";
    case ErrorCode::IncoherentBase: return "incoherent_base";
    case ErrorCode::DivisionByCertainty: return "division_by_certainty";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::MissingAssignment: return "missing_assignment";
    case ErrorCode::Data: return "data";
    case ErrorCode::Provider: return "provider";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace lam
