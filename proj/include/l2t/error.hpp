#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2t {

enum class ErrorKind {
  InvalidInput,
  ShapeMismatch,
  ModelMismatch,
  NonConvergent,
  NotProjection,
  NotComplex,
  IllConditioned,
  UnsupportedModelPair,
  Unsupported,
  NotPositive,
  NotExact,
  NotInvertible,
  NotDeterminantClass,
  HomomorphismInvalid,
  NotUnimodular,
  UnknownSpace,
  BadParams,
  NotSubcomplex,
  NotCellular,
  DimensionNotOne,
  EulerNotZero,
  MissingTransport,
  BadBundle,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace l2t
