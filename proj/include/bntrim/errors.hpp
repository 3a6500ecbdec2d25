#pragma once

#include <stdexcept>
#include <string>

namespace bntrim {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, structural violation, or an argument that does not fit
/// the model (unknown variable, feature outside the classifier, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A query conditioned on evidence of probability zero.
class ZeroEvidenceError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// An exhaustive enumeration would exceed its configured size guard.
class EnumerationGuardError : public Error {
 public:
  using Error::Error;
};

}  // namespace bntrim
