#pragma once

#include <stdexcept>
#include <string>

namespace fbmjs {

/// Numerical failure that is not a caller error (e.g. an indefinite
/// covariance or an embedding with negative eigenvalues).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The circulant embedding had an eigenvalue below -eps * max eigenvalue.
class EmbeddingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fbmjs
