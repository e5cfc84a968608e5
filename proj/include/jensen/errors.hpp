#pragma once

#include <stdexcept>
#include <string>

namespace jensen {

/// Malformed or inconsistent input (shapes, weights, ids, files).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was asked for a value outside its declared domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition of an inequality does not hold on the evaluation set
/// (negative f for the halved bound, m~/M~ not bracketing, non-convex f...).
class HypothesisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The product index space is larger than the configured enumeration cap.
class CapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// The operation needs the companion slope C(x) and the function has none.
class MissingSlope : public HypothesisError {
 public:
  using HypothesisError::HypothesisError;
};

}  // namespace jensen
