#pragma once

#include <stdexcept>

namespace vvkrr {

/// Input outside the domain a kernel or basis is defined on.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Mismatched vector / matrix shapes between cooperating objects.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization or eigendecomposition failure.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vvkrr
