#pragma once

#include <stdexcept>
#include <string>

namespace carnot {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when elements of different algebras are combined.
class AlgebraMismatch : public Error {
 public:
  using Error::Error;
};

/// Precondition violations: bad layer index, nonpositive dilation factor, ...
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

/// A structure-constant table that fails verification.
class InvalidAlgebra : public Error {
 public:
  using Error::Error;
};

/// No point of the domain was found near a requested target point.
class SparseDomainError : public Error {
 public:
  SparseDomainError(const std::string& what, double best_gap)
      : Error(what), best_gap_(best_gap) {}
  double best_gap() const { return best_gap_; }

 private:
  double best_gap_;
};

/// A first-layer map admits no h-homomorphic extension.
class InconsistentExtension : public Error {
 public:
  using Error::Error;
};

/// A directional derivative required by an operation did not converge.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace carnot
