#include "l2t/error.hpp"

namespace l2t {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NotProjection: return "NotProjection";
    case ErrorKind::NotComplex: return "NotComplex";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::UnsupportedModelPair: return "UnsupportedModelPair";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotExact: return "NotExact";
    case ErrorKind::NotInvertible: return "NotInvertible";
    case ErrorKind::NotDeterminantClass: return "NotDeterminantClass";
    case ErrorKind::HomomorphismInvalid: return "HomomorphismInvalid";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::UnknownSpace: return "UnknownSpace";
    case ErrorKind::BadParams: return "BadParams";
    case ErrorKind::NotSubcomplex: return "NotSubcomplex";
    case ErrorKind::NotCellular: return "NotCellular";
    case ErrorKind::DimensionNotOne: return "DimensionNotOne";
    case ErrorKind::EulerNotZero: return "EulerNotZero";
    case ErrorKind::MissingTransport: return "MissingTransport";
    case ErrorKind::BadBundle: return "BadBundle";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace l2t
