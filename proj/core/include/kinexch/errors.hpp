#pragma once

#include <stdexcept>
#include <string>

namespace kinexch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or inputs (negative wealth, lambda <= 0, bad pmf ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An index or dollar amount falls outside the representable range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A pmf support does not fit the requested truncation bound; enlarge n_max.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The master-equation integration lost more mass past n_max than allowed,
/// or produced a negative probability.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// Numerical linear algebra failed to converge.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace kinexch
