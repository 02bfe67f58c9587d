#pragma once

#include <stdexcept>
#include <string>

namespace fedosov {

/// Base class of every error the engine raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different charts or geometries.
class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// A jet does not carry enough valid Taylor orders for the requested operation.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of an operation (zero constant term, irrational value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Input that violates a structural precondition (non-affine observable, asymmetric Γ, ...).
class StructureError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace fedosov
